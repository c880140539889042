//! Heisenberg-Weyl displacement operators on (C^p)^(⊗N) and their
//! group laws.
//!
//! The single-site displacement is
//! D(a1, a2) = Σ_ℓ ω^{a2 ℓ} |a1 + ℓ⟩⟨ℓ| with ω = e^{2πi/p}; the
//! many-body operator is the Kronecker product over sites with site 0
//! as the leftmost factor. Every operator here is monomial, so group
//! laws and orthogonality are verified in exact phase arithmetic.

use crate::error::Result;
use crate::operator::{DenseOperator, MonomialOp};
use crate::phase::{Phase, PhasePoint, Prime};
use crate::Caps;

fn site_displacement(p: Prime, a1: u64, a2: u64) -> MonomialOp {
    let dim = p.get() as usize;
    let mut rows = Vec::with_capacity(dim);
    let mut phases = Vec::with_capacity(dim);
    for l in 0..dim as u64 {
        rows.push(((a1 + l) % p.get()) as u32);
        phases.push(Phase::omega(p, (a2 * l) as i64));
    }
    MonomialOp::new(p, rows, phases)
}

/// The displacement operator at a phase-space point, as an exact
/// monomial matrix.
pub fn displacement_monomial(point: &PhasePoint) -> MonomialOp {
    assert!(point.n_sites() >= 1, "displacement needs at least one site");
    let p = point.prime();
    let mut acc: Option<MonomialOp> = None;
    for k in 0..point.n_sites() {
        let site = site_displacement(p, point.a1.entry(k), point.a2.entry(k));
        acc = Some(match acc {
            Some(m) => m.kron(&site),
            None => site,
        });
    }
    acc.expect("at least one site")
}

/// The displacement operator as a dense matrix (exact view attached).
pub fn displacement(point: &PhasePoint) -> DenseOperator {
    DenseOperator::from_monomial(displacement_monomial(point))
}

/// The flip operator U = Σ_ℓ |ℓ⟩⟨-ℓ| on N sites, exact.
pub fn flip_monomial(p: Prime, n_sites: usize) -> MonomialOp {
    assert!(n_sites >= 1, "flip needs at least one site");
    let dim = p.get();
    let site = MonomialOp::new(
        p,
        (0..dim).map(|j| ((dim - j) % dim) as u32).collect(),
        vec![Phase::one(p); dim as usize],
    );
    let mut acc = site.clone();
    for _ in 1..n_sites {
        acc = acc.kron(&site);
    }
    acc
}

pub fn flip_operator(p: Prime, n_sites: usize) -> DenseOperator {
    DenseOperator::from_monomial(flip_monomial(p, n_sites))
}

/// The phase in D(x) D(y) = ω^{x_2 · y_1} D(x + y).
pub fn composition_phase(x: &PhasePoint, y: &PhasePoint) -> Phase {
    Phase::omega(x.prime(), x.a2.dot(&y.a1))
}

/// Exact check of the composition law at a pair of points.
pub fn composition_law_holds(x: &PhasePoint, y: &PhasePoint) -> bool {
    let lhs = displacement_monomial(x).compose(&displacement_monomial(y));
    let rhs = displacement_monomial(&x.add(y)).scaled(composition_phase(x, y));
    lhs == rhs
}

/// The phase and point in D(x)† = ω^{x_1 · x_2} D(-x).
pub fn adjoint_pair(x: &PhasePoint) -> (Phase, PhasePoint) {
    (Phase::omega(x.prime(), x.a1.dot(&x.a2)), x.neg())
}

/// Exact check of the adjoint law at a point.
pub fn adjoint_law_holds(x: &PhasePoint) -> bool {
    let (phase, neg) = adjoint_pair(x);
    displacement_monomial(x).dagger() == displacement_monomial(&neg).scaled(phase)
}

/// Exact check that conjugation by the flip negates the point:
/// U D(x) U = D(-x).
pub fn flip_conjugation_holds(x: &PhasePoint) -> bool {
    let u = flip_monomial(x.prime(), x.n_sites());
    let lhs = u.compose(&displacement_monomial(x)).compose(&u);
    lhs == displacement_monomial(&x.neg())
}

/// Exact orthogonality tr(D(x)† D(y)) = p^N δ_{x,y} over every pair of
/// grid points. The trace sums are decided in the cyclotomic ring, so
/// no tolerance is involved.
pub fn hw_orthogonality(p: Prime, n_sites: usize, caps: &Caps) -> Result<bool> {
    let dim = caps.checked_dim(p, n_sites)?;
    let grid = dim * dim;
    let monomials: Vec<MonomialOp> = (0..grid)
        .map(|flat| displacement_monomial(&PhasePoint::from_flat(p, n_sites, flat)))
        .collect();
    for (xi, x) in monomials.iter().enumerate() {
        let x_dag = x.dagger();
        for (yi, y) in monomials.iter().enumerate() {
            let tr = x_dag.compose(y).trace();
            let ok = if xi == yi {
                tr.eq_scaled_phase(dim as i64, Phase::one(p))
            } else {
                tr.is_zero()
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
