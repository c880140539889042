//! Structure constants Γ of the Wigner and Fourier-Wigner families:
//! brute-force triple-product traces, closed forms, and the
//! antisymmetrized sparse tensor that drives the equations of motion.
//!
//! Γ_{α,β,γ} := tr(B(α) B(β) B(γ)) for the chosen family B. The
//! combination entering the dynamics is antisymmetrized in the last
//! two indices, with the leading index negated in the Fourier-Wigner
//! case:
//!
//! * Wigner:         Δ_{α,β,γ} = Γ_{α,β,γ} - Γ_{α,γ,β}
//! * Fourier-Wigner: Δ_{α,β,γ} = Γ_{-α,β,γ} - Γ_{-α,γ,β}
//!
//! Γ^FW is supported on the hyperplane α+β+γ ≡ 0 (mod p) and has the
//! closed forms implemented here; Γ^W has a closed form for odd p
//! only, so brute force is the ground truth at p = 2.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::DenseOperator;
use crate::phase::{half_inverse, HalfInverse, Phase, PhasePoint, Prime};
use crate::wigner::{fourier_wigner_monomial, wigner_op, Basis};
use crate::Caps;

/// Magnitudes at or below this threshold count as zero in sparsity
/// statistics; an order above accumulated round-off at p^N ≤ 9.
pub const NNZ_THRESHOLD: f64 = 1e-10;

fn triple_shape(alpha: &PhasePoint, beta: &PhasePoint, gamma: &PhasePoint) -> (Prime, usize) {
    assert_eq!(alpha.prime(), beta.prime(), "triple prime mismatch");
    assert_eq!(alpha.prime(), gamma.prime(), "triple prime mismatch");
    assert_eq!(
        alpha.n_sites(),
        beta.n_sites(),
        "triple site-count mismatch"
    );
    assert_eq!(
        alpha.n_sites(),
        gamma.n_sites(),
        "triple site-count mismatch"
    );
    (alpha.prime(), alpha.n_sites())
}

/// tr(B(α) B(β) B(γ)) by explicit operator composition.
pub fn gamma_brute(
    basis: Basis,
    alpha: &PhasePoint,
    beta: &PhasePoint,
    gamma: &PhasePoint,
    caps: &Caps,
) -> Result<Complex64> {
    let (p, n) = triple_shape(alpha, beta, gamma);
    caps.checked_dim(p, n)?;
    Ok(match basis {
        Basis::FourierWigner => fourier_wigner_monomial(alpha)
            .compose(&fourier_wigner_monomial(beta))
            .compose(&fourier_wigner_monomial(gamma))
            .trace()
            .to_complex(),
        Basis::Wigner => wigner_op(alpha)
            .matmul(&wigner_op(beta))
            .trace_product(&wigner_op(gamma)),
    })
}

fn on_support(alpha: &PhasePoint, beta: &PhasePoint, gamma: &PhasePoint) -> bool {
    alpha.add(beta).add(gamma).flat_index() == 0
}

/// Closed form of Γ^FW. For odd p,
/// p^N ω^{2^{-1}(b2·c1 - b1·c2)} δ_{α+β+γ,0}; for p = 2,
/// 2^N (-1)^{a2·b1} i^{a1·a2} i^{b1·b2} (-i)^{c1·c2} δ_{α+β+γ,0}.
pub fn gamma_fw_closed(alpha: &PhasePoint, beta: &PhasePoint, gamma: &PhasePoint) -> Complex64 {
    let (p, n) = triple_shape(alpha, beta, gamma);
    if !on_support(alpha, beta, gamma) {
        return Complex64::new(0.0, 0.0);
    }
    let phase = match half_inverse(p) {
        HalfInverse::Modular(inv2) => Phase::omega(
            p,
            inv2 as i64 * (beta.a2.dot(&gamma.a1) - beta.a1.dot(&gamma.a2)),
        ),
        HalfInverse::HalfAsI => Phase::i_pow(
            p,
            alpha.a1.dot(&alpha.a2) + beta.a1.dot(&beta.a2) - gamma.a1.dot(&gamma.a2)
                + 2 * alpha.a2.dot(&beta.a1),
        ),
    };
    (p.get() as f64).powi(n as i32) * phase.to_complex()
}

/// The intermediate Γ^FW expression before simplification:
/// p^N ω^{2^{-1}(a1·a2 + b1·b2 + c1·c2)} ω^{a2·b1 + (a2+b2)·c1} δ,
/// with ω^{2^{-1} x} read as i^x at p = 2. Agrees with
/// `gamma_fw_closed` on the δ-support.
pub fn gamma_fw_intermediate(
    alpha: &PhasePoint,
    beta: &PhasePoint,
    gamma: &PhasePoint,
) -> Complex64 {
    let (p, n) = triple_shape(alpha, beta, gamma);
    if !on_support(alpha, beta, gamma) {
        return Complex64::new(0.0, 0.0);
    }
    let diag = alpha.a1.dot(&alpha.a2) + beta.a1.dot(&beta.a2) + gamma.a1.dot(&gamma.a2);
    let cross = alpha.a2.dot(&beta.a1) + alpha.a2.add(&beta.a2).dot(&gamma.a1);
    let phase = match half_inverse(p) {
        HalfInverse::Modular(inv2) => Phase::omega(p, inv2 as i64 * diag + cross),
        HalfInverse::HalfAsI => Phase::i_pow(p, diag).mul(Phase::minus_one(p).pow(cross)),
    };
    (p.get() as f64).powi(n as i32) * phase.to_complex()
}

/// Closed form of Γ^W for odd p:
/// ω^{2(b1-a1)·(c2-a2) - 2(b2-a2)·(c1-a1)}, a unit-modulus phase.
/// Integrating the FW closed form against the triple Fourier kernel
/// collapses the character sums onto c' = (2(b2-a2), -2(b1-a1)).
pub fn gamma_w_closed(
    alpha: &PhasePoint,
    beta: &PhasePoint,
    gamma: &PhasePoint,
) -> Result<Complex64> {
    let (p, _) = triple_shape(alpha, beta, gamma);
    if p.is_two() {
        return Err(Error::RequiresOddPrime);
    }
    let db1 = beta.a1.sub(&alpha.a1);
    let dc2 = gamma.a2.sub(&alpha.a2);
    let db2 = beta.a2.sub(&alpha.a2);
    let dc1 = gamma.a1.sub(&alpha.a1);
    Ok(Phase::omega(p, 2 * (db1.dot(&dc2) - db2.dot(&dc1))).to_complex())
}

/// Δ_{α,β,γ} for the chosen family, by brute force.
pub fn antisymmetrized_brute(
    basis: Basis,
    alpha: &PhasePoint,
    beta: &PhasePoint,
    gamma: &PhasePoint,
    caps: &Caps,
) -> Result<Complex64> {
    let lead = match basis {
        Basis::Wigner => alpha.clone(),
        Basis::FourierWigner => alpha.neg(),
    };
    Ok(gamma_brute(basis, &lead, beta, gamma, caps)?
        - gamma_brute(basis, &lead, gamma, beta, caps)?)
}

fn wigner_family(p: Prime, n_sites: usize) -> Vec<DenseOperator> {
    let dim = (p.get() as usize).pow(n_sites as u32);
    (0..dim * dim)
        .map(|flat| wigner_op(&PhasePoint::from_flat(p, n_sites, flat)))
        .collect()
}

/// Streams every potentially nonzero Δ entry to the callback.
///
/// Fourier-Wigner entries come from the closed form restricted to its
/// support (the leading index is forced to α = β + γ); Wigner entries
/// come from brute-force commutator traces over ordered pairs β < γ,
/// using Δ_{α,γ,β} = -Δ_{α,β,γ}.
fn for_each_antisym<F: FnMut(usize, usize, usize, Complex64)>(
    basis: Basis,
    p: Prime,
    n_sites: usize,
    caps: &Caps,
    mut emit: F,
) -> Result<()> {
    caps.checked_triples(p, n_sites)?;
    let grid = (p.get() as usize).pow(2 * n_sites as u32);
    match basis {
        Basis::FourierWigner => {
            let points: Vec<PhasePoint> = (0..grid)
                .map(|f| PhasePoint::from_flat(p, n_sites, f))
                .collect();
            for (bf, beta) in points.iter().enumerate() {
                for (gf, gamma) in points.iter().enumerate() {
                    let alpha = beta.add(gamma);
                    let neg = alpha.neg();
                    let v = gamma_fw_closed(&neg, beta, gamma) - gamma_fw_closed(&neg, gamma, beta);
                    if v.norm() > NNZ_THRESHOLD {
                        emit(alpha.flat_index(), bf, gf, v);
                    }
                }
            }
        }
        Basis::Wigner => {
            caps.checked_dim(p, n_sites)?;
            let ops = wigner_family(p, n_sites);
            for b in 0..grid {
                for g in (b + 1)..grid {
                    let comm = ops[b].matmul(&ops[g]).sub(&ops[g].matmul(&ops[b]));
                    for (a, op) in ops.iter().enumerate() {
                        let v = op.trace_product(&comm);
                        if v.norm() > NNZ_THRESHOLD {
                            emit(a, b, g, v);
                            emit(a, g, b, -v);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Number of triples with |Δ_{α,β,γ}| above the sparsity threshold.
pub fn antisymmetrized_nnz(basis: Basis, p: Prime, n_sites: usize, caps: &Caps) -> Result<u64> {
    let mut count = 0u64;
    for_each_antisym(basis, p, n_sites, caps, |_, _, _, _| count += 1)?;
    Ok(count)
}

/// Sparse antisymmetrized structure-constant tensor Δ, keyed by the
/// flat indices (α, β, γ) in sorted order.
pub struct GammaTensor {
    p: Prime,
    n_sites: usize,
    basis: Basis,
    entries: BTreeMap<(u32, u32, u32), Complex64>,
}

impl GammaTensor {
    pub fn build(basis: Basis, p: Prime, n_sites: usize, caps: &Caps) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for_each_antisym(basis, p, n_sites, caps, |a, b, g, v| {
            entries.insert((a as u32, b as u32, g as u32), v);
        })?;
        Ok(GammaTensor {
            p,
            n_sites,
            basis,
            entries,
        })
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn nnz(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn get(&self, alpha: usize, beta: usize, gamma: usize) -> Complex64 {
        self.entries
            .get(&(alpha as u32, beta as u32, gamma as u32))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Nonzero entries in ascending (α, β, γ) order.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32, u32), Complex64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn pt(pr: Prime, a1: i64, a2: i64) -> PhasePoint {
        PhasePoint::single(pr, a1, a2)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_triple_values() {
        let caps = Caps::default();
        // FW(0) = I so the FW value is p^N. W(0,0) at p=2 is
        // ½(I+Z+X+Y), whose cube is (5/4)I + (3/4)(Z+X+Y) with trace
        // 5/2; tensor powers square that. For odd p the W value is 1.
        let cases: &[(u64, usize, f64)] = &[(2, 1, 2.5), (2, 2, 6.25), (3, 1, 1.0)];
        for &(pr, n, w_want) in cases {
            let zero = PhasePoint::zero(p(pr), n);
            let dim = (pr as f64).powi(n as i32);
            let fw = gamma_brute(Basis::FourierWigner, &zero, &zero, &zero, &caps).unwrap();
            assert!((fw - c(dim, 0.0)).norm() <= 1e-12);
            assert!((gamma_fw_closed(&zero, &zero, &zero) - c(dim, 0.0)).norm() <= 1e-15);
            let w = gamma_brute(Basis::Wigner, &zero, &zero, &zero, &caps).unwrap();
            assert!(
                (w - c(w_want, 0.0)).norm() <= 1e-12,
                "W zero triple at p={pr}, N={n}"
            );
        }
    }

    #[test]
    fn pauli_triple_traces() {
        let caps = Caps::default();
        let two = p(2);
        // tr(X Z Y) = -2i.
        let got = gamma_brute(
            Basis::FourierWigner,
            &pt(two, 1, 0),
            &pt(two, 0, 1),
            &pt(two, 1, 1),
            &caps,
        )
        .unwrap();
        assert!((got - c(0.0, -2.0)).norm() <= 1e-15);
        // tr(Y X Z) = -2i, and the closed form agrees.
        let (a, b, g) = (pt(two, 1, 1), pt(two, 1, 0), pt(two, 0, 1));
        let brute = gamma_brute(Basis::FourierWigner, &a, &b, &g, &caps).unwrap();
        assert!((brute - c(0.0, -2.0)).norm() <= 1e-15);
        assert!((gamma_fw_closed(&a, &b, &g) - c(0.0, -2.0)).norm() <= 1e-15);
    }

    #[test]
    fn qutrit_fw_closed_example() {
        // α=(1,0), β=(2,1), γ=(0,2): on support, value 3ω.
        let three = p(3);
        let (a, b, g) = (pt(three, 1, 0), pt(three, 2, 1), pt(three, 0, 2));
        let want = 3.0 * Phase::omega(three, 1).to_complex();
        assert!((gamma_fw_closed(&a, &b, &g) - want).norm() <= 1e-15);
        let caps = Caps::default();
        let brute = gamma_brute(Basis::FourierWigner, &a, &b, &g, &caps).unwrap();
        assert!((brute - want).norm() <= 1e-12);
    }

    #[test]
    fn qutrit_w_closed_example() {
        // α=(0,0), β=(1,0), γ=(0,1) at p = 3. By hand: W(0,0) is the
        // flip, W(1,0)W(0,1)|j> = ω^{4-2j}|j-2>, so the triple product
        // maps |j> to ω^{4-2j}|2-j> and the trace picks j = 1, giving
        // ω². Brute force agrees.
        let three = p(3);
        let caps = Caps::default();
        let (a, b, g) = (pt(three, 0, 0), pt(three, 1, 0), pt(three, 0, 1));
        let want = Phase::omega(three, 2).to_complex();
        assert!((gamma_w_closed(&a, &b, &g).unwrap() - want).norm() <= 1e-15);
        let brute = gamma_brute(Basis::Wigner, &a, &b, &g, &caps).unwrap();
        assert!((brute - want).norm() <= 1e-12);
        assert!(gamma_w_closed(&pt(p(2), 0, 0), &pt(p(2), 0, 0), &pt(p(2), 0, 0)).is_err());
    }

    #[test]
    fn w_closed_degenerate_cases() {
        let five = p(5);
        // α = β = γ → 1; β = γ → 1 for any α.
        for flat in 0..25 {
            let a = PhasePoint::from_flat(five, 1, flat);
            assert!((gamma_w_closed(&a, &a, &a).unwrap() - c(1.0, 0.0)).norm() <= 1e-15);
            let b = PhasePoint::from_flat(five, 1, (flat + 7) % 25);
            assert!((gamma_w_closed(&a, &b, &b).unwrap() - c(1.0, 0.0)).norm() <= 1e-15);
        }
    }

    #[test]
    fn closed_forms_match_brute_exhaustively() {
        let caps = Caps::default();
        for (pr, n) in [(2u64, 1usize), (3, 1), (2, 2)] {
            let pp = p(pr);
            let grid = (pr as usize).pow(2 * n as u32);
            for af in 0..grid {
                let a = PhasePoint::from_flat(pp, n, af);
                for bf in 0..grid {
                    let b = PhasePoint::from_flat(pp, n, bf);
                    for gf in 0..grid {
                        let g = PhasePoint::from_flat(pp, n, gf);
                        let brute_fw =
                            gamma_brute(Basis::FourierWigner, &a, &b, &g, &caps).unwrap();
                        let dev = (brute_fw - gamma_fw_closed(&a, &b, &g)).norm();
                        assert!(dev <= 1e-10, "FW closed dev {dev} at p={pr}, N={n}");
                        if pr != 2 {
                            let brute_w = gamma_brute(Basis::Wigner, &a, &b, &g, &caps).unwrap();
                            let dev = (brute_w - gamma_w_closed(&a, &b, &g).unwrap()).norm();
                            assert!(dev <= 1e-10, "W closed dev {dev} at p={pr}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn intermediate_matches_simplified_on_support() {
        for pr in [2u64, 3, 5] {
            let pp = p(pr);
            let grid = (pr * pr) as usize;
            for bf in 0..grid {
                let b = PhasePoint::from_flat(pp, 1, bf);
                for gf in 0..grid {
                    let g = PhasePoint::from_flat(pp, 1, gf);
                    let a = b.add(&g).neg();
                    let dev =
                        (gamma_fw_intermediate(&a, &b, &g) - gamma_fw_closed(&a, &b, &g)).norm();
                    assert!(dev <= 1e-12, "intermediate dev {dev} at p={pr}");
                }
            }
        }
    }

    #[test]
    fn fw_support_is_the_zero_hyperplane() {
        let caps = Caps::default();
        for pr in [2u64, 3] {
            let pp = p(pr);
            let grid = (pr * pr) as usize;
            for af in 0..grid {
                let a = PhasePoint::from_flat(pp, 1, af);
                for bf in 0..grid {
                    let b = PhasePoint::from_flat(pp, 1, bf);
                    for gf in 0..grid {
                        let g = PhasePoint::from_flat(pp, 1, gf);
                        if !on_support(&a, &b, &g) {
                            let v = gamma_brute(Basis::FourierWigner, &a, &b, &g, &caps).unwrap();
                            assert!(v.norm() <= 1e-12, "off-support leak at p={pr}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn brute_trace_is_cyclic() {
        let caps = Caps::default();
        let two = p(2);
        for basis in [Basis::Wigner, Basis::FourierWigner] {
            for af in 0..4 {
                let a = PhasePoint::from_flat(two, 1, af);
                for bf in 0..4 {
                    let b = PhasePoint::from_flat(two, 1, bf);
                    for gf in 0..4 {
                        let g = PhasePoint::from_flat(two, 1, gf);
                        let lhs = gamma_brute(basis, &a, &b, &g, &caps).unwrap();
                        let rhs = gamma_brute(basis, &b, &g, &a, &caps).unwrap();
                        assert!((lhs - rhs).norm() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn antisymmetrized_nnz_small_tables() {
        let caps = Caps::default();
        let cases: &[(u64, usize, u64, u64)] = &[(2, 1, 24, 6), (3, 1, 432, 48), (2, 2, 2208, 120)];
        for &(pr, n, w_nnz, fw_nnz) in cases {
            let pp = p(pr);
            assert_eq!(
                antisymmetrized_nnz(Basis::Wigner, pp, n, &caps).unwrap(),
                w_nnz,
                "W nnz at p={pr}, N={n}"
            );
            assert_eq!(
                antisymmetrized_nnz(Basis::FourierWigner, pp, n, &caps).unwrap(),
                fw_nnz,
                "FW nnz at p={pr}, N={n}"
            );
        }
    }

    #[test]
    fn fw_nnz_two_qutrits() {
        let caps = Caps::default();
        assert_eq!(
            antisymmetrized_nnz(Basis::FourierWigner, p(3), 2, &caps).unwrap(),
            4320
        );
    }

    #[test]
    fn tensor_matches_brute_antisymmetrization() {
        let caps = Caps::default();
        let two = p(2);
        for basis in [Basis::Wigner, Basis::FourierWigner] {
            let tensor = GammaTensor::build(basis, two, 1, &caps).unwrap();
            assert_eq!(
                tensor.nnz(),
                antisymmetrized_nnz(basis, two, 1, &caps).unwrap()
            );
            for af in 0..4 {
                let a = PhasePoint::from_flat(two, 1, af);
                for bf in 0..4 {
                    let b = PhasePoint::from_flat(two, 1, bf);
                    for gf in 0..4 {
                        let g = PhasePoint::from_flat(two, 1, gf);
                        let want = antisymmetrized_brute(basis, &a, &b, &g, &caps).unwrap();
                        let got = tensor.get(af, bf, gf);
                        assert!(
                            (got - want).norm() <= 1e-12,
                            "tensor mismatch for {basis:?} at ({af},{bf},{gf})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn caps_reject_oversized_enumerations() {
        let caps = Caps {
            max_dim: 243,
            max_triples: 1000,
        };
        assert!(matches!(
            antisymmetrized_nnz(Basis::FourierWigner, p(3), 2, &caps),
            Err(Error::CapExceeded { .. })
        ));
    }
}
