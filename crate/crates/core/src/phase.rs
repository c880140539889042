//! Exact arithmetic for the phases and index vectors of the
//! displacement-operator calculus.
//!
//! Every phase produced by composing displacement operators, flip
//! operators, and their Fourier-Wigner combinations is a 4p-th root of
//! unity: the p-th roots ω^k = e^{2πik/p} together with the quarter
//! turns ±1, ±i (the quarter turns only arise at p = 2, where the
//! Fourier-Wigner phase correction needs i; for odd p the exponents
//! stay divisible by 4). [`Phase`] stores the exponent of
//! ζ = e^{2πi/(4p)} reduced modulo 4p, so products, conjugates, and
//! powers are exact integer arithmetic. Conversion to `Complex64`
//! happens only at the numerical boundary.
//!
//! [`PhaseSum`] accumulates formal integer combinations of phases and
//! decides vanishing exactly in the cyclotomic ring Z[ζ_{4p}], which is
//! what makes orthogonality checks like tr(D(x)† D(y)) = p^N δ_{x,y}
//! tolerance-free.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A prime modulus, validated at construction.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || (p > 2 && p % 2 == 0) {
            return Err(Error::NotPrime(p));
        }
        let mut d = 3;
        while d * d <= p {
            if p % d == 0 {
                return Err(Error::NotPrime(p));
            }
            d += 2;
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_two(self) -> bool {
        self.0 == 2
    }

    /// The multiplicative inverse of 2 mod p, defined for odd p.
    pub fn two_inverse(self) -> Result<u64> {
        match half_inverse(self) {
            HalfInverse::Modular(v) => Ok(v),
            HalfInverse::HalfAsI => Err(Error::RequiresOddPrime),
        }
    }
}

impl fmt::Debug for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Reduces an integer to its canonical residue in [0, m).
#[inline]
pub fn canonical_residue(x: i64, m: u64) -> u64 {
    let m = m as i64;
    (((x % m) + m) % m) as u64
}

/// A unit phase ζ^e with ζ = e^{2πi/(4p)}, exponent kept in [0, 4p).
///
/// ω = ζ^4 and i = ζ^p, so the p-th roots of unity and the quarter
/// turns share one exact representation for every prime.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase {
    p: Prime,
    exponent: u64,
}

impl Phase {
    /// The phase ζ^e for an arbitrary (unreduced) exponent.
    pub fn from_zeta_exponent(p: Prime, e: i64) -> Self {
        Phase {
            p,
            exponent: canonical_residue(e, 4 * p.get()),
        }
    }

    pub fn one(p: Prime) -> Self {
        Phase { p, exponent: 0 }
    }

    /// ω^e where ω = e^{2πi/p}; the exponent may be any integer.
    pub fn omega(p: Prime, e: i64) -> Self {
        Self::from_zeta_exponent(p, 4 * (canonical_residue(e, p.get()) as i64))
    }

    /// i^k for any integer k.
    pub fn i_pow(p: Prime, k: i64) -> Self {
        Self::from_zeta_exponent(p, p.get() as i64 * (canonical_residue(k, 4) as i64))
    }

    pub fn minus_one(p: Prime) -> Self {
        Self::i_pow(p, 2)
    }

    #[inline]
    pub fn prime(self) -> Prime {
        self.p
    }

    /// The stored exponent of ζ = e^{2πi/(4p)}, in [0, 4p).
    #[inline]
    pub fn zeta_exponent(self) -> u64 {
        self.exponent
    }

    /// Exact product of two phases.
    ///
    /// # Panics
    ///
    /// Panics if the operands carry different primes.
    pub fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p, "phase product across different primes");
        Phase {
            p: self.p,
            exponent: (self.exponent + rhs.exponent) % (4 * self.p.get()),
        }
    }

    /// Complex conjugate (the group inverse on the unit circle).
    pub fn conj(self) -> Self {
        Self::from_zeta_exponent(self.p, -(self.exponent as i64))
    }

    pub fn pow(self, k: i64) -> Self {
        // The exponent stays well inside i64: 4p < 2^32 and |k| reduced first.
        let k = canonical_residue(k, 4 * self.p.get()) as i64;
        Self::from_zeta_exponent(self.p, self.exponent as i64 * k)
    }

    /// Numerical value. Exact at the quarter turns (exponents 0, p, 2p,
    /// 3p); elsewhere a sin/cos evaluation.
    pub fn to_complex(self) -> Complex64 {
        let p = self.p.get();
        match self.exponent {
            0 => Complex64::new(1.0, 0.0),
            e if e == p => Complex64::new(0.0, 1.0),
            e if e == 2 * p => Complex64::new(-1.0, 0.0),
            e if e == 3 * p => Complex64::new(0.0, -1.0),
            e => {
                let theta = 2.0 * std::f64::consts::PI * (e as f64) / (4.0 * p as f64);
                Complex64::new(theta.cos(), theta.sin())
            }
        }
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeta[{}]^{}", 4 * self.p.get(), self.exponent)
    }
}

/// ω^e as a convenience free function.
pub fn omega_pow(p: Prime, e: i64) -> Phase {
    Phase::omega(p, e)
}

/// The character sum Σ_{n=0}^{p-1} ω^{nx}: p when x ≡ 0 (mod p), else 0.
pub fn character_sum(p: Prime, x: i64) -> u64 {
    if canonical_residue(x, p.get()) == 0 {
        p.get()
    } else {
        0
    }
}

/// The meaning of the formal factor 1/2 appearing in exponents.
///
/// For odd p it is the modular inverse (p+1)/2 of 2; for p = 2 the
/// factor stands for the literal square root ω^{1/2} = i instead, and no
/// modular inverse exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfInverse {
    Modular(u64),
    HalfAsI,
}

pub fn half_inverse(p: Prime) -> HalfInverse {
    if p.is_two() {
        HalfInverse::HalfAsI
    } else {
        HalfInverse::Modular((p.get() + 1) / 2)
    }
}

/// A length-N vector with entries kept canonical in [0, p).
///
/// Arithmetic is componentwise mod p; dot products are returned as
/// plain integers (callers reduce them inside a phase exponent, which
/// is where they are consumed).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModVec {
    p: Prime,
    entries: Vec<u64>,
}

impl ModVec {
    /// Builds from canonical entries.
    ///
    /// # Panics
    ///
    /// Panics if any entry is ≥ p.
    pub fn new(p: Prime, entries: Vec<u64>) -> Self {
        assert!(
            entries.iter().all(|&x| x < p.get()),
            "ModVec entries must lie in [0, p)"
        );
        ModVec { p, entries }
    }

    /// Builds from arbitrary integers, reducing each mod p.
    pub fn from_unreduced(p: Prime, entries: &[i64]) -> Self {
        ModVec {
            p,
            entries: entries
                .iter()
                .map(|&x| canonical_residue(x, p.get()))
                .collect(),
        }
    }

    pub fn zeros(p: Prime, n: usize) -> Self {
        ModVec {
            p,
            entries: vec![0; n],
        }
    }

    /// The standard basis vector e_k (sites counted from 0).
    pub fn basis_vector(p: Prime, n: usize, k: usize) -> Self {
        assert!(k < n, "basis vector index out of range");
        let mut entries = vec![0; n];
        entries[k] = 1;
        ModVec { p, entries }
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn entry(&self, k: usize) -> u64 {
        self.entries[k]
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(u64, u64, u64) -> u64) -> Self {
        assert_eq!(self.p, rhs.p, "vector arithmetic across different primes");
        assert_eq!(self.len(), rhs.len(), "vector arithmetic across lengths");
        let p = self.p.get();
        ModVec {
            p: self.p,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| f(a, b, p))
                .collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b, p| (a + b) % p)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b, p| (a + p - b) % p)
    }

    pub fn neg(&self) -> Self {
        let p = self.p.get();
        ModVec {
            p: self.p,
            entries: self.entries.iter().map(|&a| (p - a) % p).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        let p = self.p.get();
        let k = canonical_residue(k, p);
        ModVec {
            p: self.p,
            entries: self.entries.iter().map(|&a| (a * k) % p).collect(),
        }
    }

    /// Integer dot product of the canonical entries (not reduced).
    pub fn dot(&self, rhs: &Self) -> i64 {
        assert_eq!(self.p, rhs.p, "dot product across different primes");
        assert_eq!(self.len(), rhs.len(), "dot product across lengths");
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| (a * b) as i64)
            .sum()
    }

    /// Base-p flattening with site 0 most significant.
    pub fn flat_index(&self) -> usize {
        let p = self.p.get() as usize;
        self.entries
            .iter()
            .fold(0usize, |acc, &d| acc * p + d as usize)
    }

    pub fn from_flat(p: Prime, n: usize, mut flat: usize) -> Self {
        let base = p.get() as usize;
        let mut entries = vec![0u64; n];
        for k in (0..n).rev() {
            entries[k] = (flat % base) as u64;
            flat /= base;
        }
        assert_eq!(flat, 0, "flat index out of range for p^n");
        ModVec { p, entries }
    }
}

impl fmt::Debug for ModVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} (mod {})", self.entries, self.p)
    }
}

/// A phase-space point α = (a1, a2) ∈ [p]^N × [p]^N.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhasePoint {
    pub a1: ModVec,
    pub a2: ModVec,
}

impl PhasePoint {
    pub fn new(a1: ModVec, a2: ModVec) -> Self {
        assert_eq!(a1.prime(), a2.prime(), "phase point with mixed primes");
        assert_eq!(a1.len(), a2.len(), "phase point with mixed lengths");
        PhasePoint { a1, a2 }
    }

    /// Single-site point from scalar coordinates, reduced mod p.
    pub fn single(p: Prime, a1: i64, a2: i64) -> Self {
        PhasePoint {
            a1: ModVec::from_unreduced(p, &[a1]),
            a2: ModVec::from_unreduced(p, &[a2]),
        }
    }

    pub fn from_unreduced(p: Prime, a1: &[i64], a2: &[i64]) -> Self {
        Self::new(ModVec::from_unreduced(p, a1), ModVec::from_unreduced(p, a2))
    }

    pub fn zero(p: Prime, n: usize) -> Self {
        PhasePoint {
            a1: ModVec::zeros(p, n),
            a2: ModVec::zeros(p, n),
        }
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.a1.prime()
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.a1.len()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        PhasePoint {
            a1: self.a1.add(&rhs.a1),
            a2: self.a2.add(&rhs.a2),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        PhasePoint {
            a1: self.a1.sub(&rhs.a1),
            a2: self.a2.sub(&rhs.a2),
        }
    }

    pub fn neg(&self) -> Self {
        PhasePoint {
            a1: self.a1.neg(),
            a2: self.a2.neg(),
        }
    }

    /// The site-k component as a single-site point.
    pub fn site(&self, k: usize) -> Self {
        let p = self.prime();
        PhasePoint {
            a1: ModVec::new(p, vec![self.a1.entry(k)]),
            a2: ModVec::new(p, vec![self.a2.entry(k)]),
        }
    }

    /// Flattening (a1 as base-p integer) · p^N + (a2 as base-p integer).
    pub fn flat_index(&self) -> usize {
        let dim = (self.prime().get() as usize).pow(self.n_sites() as u32);
        self.a1.flat_index() * dim + self.a2.flat_index()
    }

    pub fn from_flat(p: Prime, n: usize, flat: usize) -> Self {
        let dim = (p.get() as usize).pow(n as u32);
        assert!(flat < dim * dim, "flat index out of range for p^{{2N}}");
        PhasePoint {
            a1: ModVec::from_flat(p, n, flat / dim),
            a2: ModVec::from_flat(p, n, flat % dim),
        }
    }
}

impl fmt::Debug for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.a1.entries(), self.a2.entries())
    }
}

/// Kronecker delta of two phase-space points (componentwise mod p).
pub fn delta_p(a: &PhasePoint, b: &PhasePoint) -> Result<bool> {
    if a.prime() != b.prime() || a.n_sites() != b.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "delta_p over (p={}, N={}) vs (p={}, N={})",
            a.prime(),
            a.n_sites(),
            b.prime(),
            b.n_sites()
        )));
    }
    Ok(a == b)
}

/// A formal integer combination of 4p-th roots of unity.
///
/// Vanishing is decided exactly: coefficients are folded with
/// ζ^{e+2p} = -ζ^e, after which the element is zero iff (for p = 2) all
/// four residual coefficients vanish, or (for odd p) the product with
/// x² + 1 vanishes modulo x^{2p} + 1, which is division by the
/// cyclotomic polynomial Φ_{4p}(x) = (x^{2p} + 1)/(x² + 1) in disguise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseSum {
    p: Prime,
    counts: Vec<i64>,
}

impl PhaseSum {
    pub fn zero(p: Prime) -> Self {
        PhaseSum {
            p,
            counts: vec![0; (4 * p.get()) as usize],
        }
    }

    pub fn from_phase(ph: Phase) -> Self {
        let mut s = Self::zero(ph.prime());
        s.add_phase(ph);
        s
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn add_phase(&mut self, ph: Phase) {
        self.add_scaled(ph, 1);
    }

    pub fn add_scaled(&mut self, ph: Phase, k: i64) {
        assert_eq!(self.p, ph.prime(), "phase sum across different primes");
        self.counts[ph.zeta_exponent() as usize] += k;
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "phase sum across different primes");
        PhaseSum {
            p: self.p,
            counts: self
                .counts
                .iter()
                .zip(&rhs.counts)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// Folds ζ^{e+2p} = -ζ^e, leaving coefficients of ζ^0 .. ζ^{2p-1}.
    fn folded(&self) -> Vec<i64> {
        let half = (2 * self.p.get()) as usize;
        let mut d = vec![0i64; half];
        for (e, &c) in self.counts.iter().enumerate() {
            if e < half {
                d[e] += c;
            } else {
                d[e - half] -= c;
            }
        }
        d
    }

    /// Exact test for vanishing in Z[ζ_{4p}].
    pub fn is_zero(&self) -> bool {
        let d = self.folded();
        if self.p.is_two() {
            // Φ_8 has degree 4: the folded coefficients are coordinates
            // in an integral basis.
            return d.iter().all(|&c| c == 0);
        }
        // ζ is a root of x^{2p} + 1 = Φ_{4p}(x) (x² + 1); the folded
        // polynomial vanishes at ζ iff Φ_{4p} divides it, i.e. iff
        // (x² + 1)·d(x) ≡ 0 mod (x^{2p} + 1).
        let half = d.len();
        (0..half).all(|j| {
            let wrapped = if j >= 2 { d[j - 2] } else { -d[half + j - 2] };
            d[j] + wrapped == 0
        })
    }

    /// Exact test `self == k · ph`.
    pub fn eq_scaled_phase(&self, k: i64, ph: Phase) -> bool {
        let mut rhs = Self::zero(self.p);
        rhs.add_scaled(ph, k);
        self.sub(&rhs).is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, &c) in self.counts.iter().enumerate() {
            if c != 0 {
                acc += (c as f64) * Phase::from_zeta_exponent(self.p, e as i64).to_complex();
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn prime_validation() {
        for good in [2u64, 3, 5, 7, 11, 13, 31] {
            assert!(Prime::new(good).is_ok(), "{good} should be prime");
        }
        for bad in [0u64, 1, 4, 6, 9, 15, 243] {
            assert!(Prime::new(bad).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn omega_reduces_exponents() {
        // (e, p, expected zeta exponent)
        let cases: &[(i64, u64, u64)] = &[
            (3, 2, 4),  // omega^3 = omega = -1 at p = 2
            (7, 5, 8),  // omega^7 = omega^2
            (-1, 3, 8), // omega^{-1} = omega^2
            (0, 7, 0),
        ];
        for &(e, pr, want) in cases {
            let got = Phase::omega(p(pr), e).zeta_exponent();
            assert_eq!(got, want, "omega^{e} at p = {pr}");
        }
    }

    #[test]
    fn quarter_turns_are_exact() {
        for pr in [2u64, 3, 5, 7] {
            let pp = p(pr);
            assert_eq!(Phase::one(pp).to_complex(), Complex64::new(1.0, 0.0));
            assert_eq!(Phase::i_pow(pp, 1).to_complex(), Complex64::new(0.0, 1.0));
            assert_eq!(Phase::minus_one(pp).to_complex(), Complex64::new(-1.0, 0.0));
            assert_eq!(Phase::i_pow(pp, 3).to_complex(), Complex64::new(0.0, -1.0));
        }
        // p = 2: omega itself is the quarter point -1.
        assert_eq!(
            Phase::omega(p(2), 1).to_complex(),
            Complex64::new(-1.0, 0.0)
        );
    }

    #[test]
    fn phase_products() {
        // i · i = -1 at p = 2
        let i2 = Phase::i_pow(p(2), 1);
        assert_eq!(i2.mul(i2), Phase::minus_one(p(2)));
        // omega^1 · omega^{p-1} = 1
        for pr in [2u64, 3, 5, 7] {
            let pp = p(pr);
            let prod = Phase::omega(pp, 1).mul(Phase::omega(pp, pr as i64 - 1));
            assert_eq!(prod, Phase::one(pp));
        }
        // omega^2 · omega^2 = omega at p = 3
        assert_eq!(
            Phase::omega(p(3), 2).mul(Phase::omega(p(3), 2)),
            Phase::omega(p(3), 1)
        );
    }

    #[test]
    fn omega_exponent_homomorphism() {
        for pr in [2u64, 3, 5, 7] {
            let pp = p(pr);
            for e in -20i64..=20 {
                for f in -20i64..=20 {
                    assert_eq!(
                        Phase::omega(pp, e).mul(Phase::omega(pp, f)),
                        Phase::omega(pp, e + f)
                    );
                }
            }
        }
    }

    #[test]
    fn to_complex_is_homomorphism() {
        for pr in [2u64, 3, 5, 7] {
            let pp = p(pr);
            let order = 4 * pr as i64;
            for e in 0..order {
                for f in 0..order {
                    let a = Phase::from_zeta_exponent(pp, e);
                    let b = Phase::from_zeta_exponent(pp, f);
                    let lhs = a.mul(b).to_complex();
                    let rhs = a.to_complex() * b.to_complex();
                    assert!(
                        (lhs - rhs).norm() <= 1e-12,
                        "homomorphism violated at p={pr}, e={e}, f={f}"
                    );
                }
            }
        }
    }

    #[test]
    fn conj_inverts() {
        for pr in [2u64, 5] {
            let pp = p(pr);
            for e in 0..(4 * pr as i64) {
                let ph = Phase::from_zeta_exponent(pp, e);
                assert_eq!(ph.mul(ph.conj()), Phase::one(pp));
            }
        }
    }

    #[test]
    fn character_sum_values() {
        assert_eq!(character_sum(p(5), 0), 5);
        assert_eq!(character_sum(p(3), 3), 3);
        assert_eq!(character_sum(p(7), 1), 0);
        assert_eq!(character_sum(p(3), -6), 3);
    }

    #[test]
    fn character_sum_matches_numeric_sum() {
        for pr in [2u64, 3, 5, 7] {
            let pp = p(pr);
            for x in -(2 * pr as i64)..=(2 * pr as i64) {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in 0..pr as i64 {
                    acc += Phase::omega(pp, n * x).to_complex();
                }
                let want = character_sum(pp, x) as f64;
                assert!(
                    (acc - Complex64::new(want, 0.0)).norm() <= 1e-12,
                    "character sum mismatch at p={pr}, x={x}"
                );
            }
        }
    }

    #[test]
    fn half_inverse_values() {
        assert_eq!(half_inverse(p(3)), HalfInverse::Modular(2));
        assert_eq!(half_inverse(p(5)), HalfInverse::Modular(3));
        assert_eq!(half_inverse(p(7)), HalfInverse::Modular(4));
        assert_eq!(half_inverse(p(2)), HalfInverse::HalfAsI);
        // 2 · (p+1)/2 ≡ 1 (mod p)
        for pr in [3u64, 5, 7, 11, 13] {
            if let HalfInverse::Modular(v) = half_inverse(p(pr)) {
                assert_eq!((2 * v) % pr, 1);
            } else {
                panic!("odd prime must yield a modular inverse");
            }
        }
    }

    #[test]
    fn modvec_arithmetic() {
        let pp = p(3);
        let a = ModVec::from_unreduced(pp, &[4, -1]);
        assert_eq!(a.entries(), &[1, 2]);
        let b = ModVec::new(pp, vec![2, 2]);
        assert_eq!(a.add(&b).entries(), &[0, 1]);
        assert_eq!(a.sub(&b).entries(), &[2, 0]);
        assert_eq!(a.neg().entries(), &[2, 1]);
        assert_eq!(a.scale(2).entries(), &[2, 1]);
        assert_eq!(a.dot(&b), 1 * 2 + 2 * 2);
    }

    #[test]
    fn flat_index_round_trip() {
        for pr in [2u64, 3, 5] {
            let pp = p(pr);
            for n in 1..=3usize {
                let dim = (pr as usize).pow(n as u32);
                for flat in 0..dim {
                    let v = ModVec::from_flat(pp, n, flat);
                    assert_eq!(v.flat_index(), flat);
                }
                for flat in 0..dim * dim {
                    let pt = PhasePoint::from_flat(pp, n, flat);
                    assert_eq!(pt.flat_index(), flat);
                }
            }
        }
    }

    #[test]
    fn flat_index_is_big_endian_in_sites() {
        // Site 0 is the most significant digit.
        let v = ModVec::new(p(3), vec![2, 1]);
        assert_eq!(v.flat_index(), 2 * 3 + 1);
        let pt = PhasePoint::new(ModVec::new(p(2), vec![1, 0]), ModVec::new(p(2), vec![0, 1]));
        assert_eq!(pt.flat_index(), 0b10 * 4 + 0b01);
    }

    #[test]
    fn delta_p_cases() {
        let pp = p(5);
        let a = PhasePoint::single(pp, 2, 3);
        let b = PhasePoint::single(pp, 7, -2);
        assert!(delta_p(&a, &b).unwrap()); // 7 ≡ 2, -2 ≡ 3 (mod 5)
        let c = PhasePoint::single(pp, 2, 4);
        assert!(!delta_p(&a, &c).unwrap());
        let other = PhasePoint::single(p(3), 2, 0);
        assert!(delta_p(&a, &other).is_err());
    }

    #[test]
    fn phase_sum_detects_vanishing_character_sums() {
        for pr in [2u64, 3, 5, 7] {
            let pp = p(pr);
            for x in 0..pr as i64 {
                let mut s = PhaseSum::zero(pp);
                for n in 0..pr as i64 {
                    s.add_phase(Phase::omega(pp, n * x));
                }
                if x == 0 {
                    assert!(s.eq_scaled_phase(pr as i64, Phase::one(pp)));
                    assert!(!s.is_zero());
                } else {
                    assert!(s.is_zero(), "sum of omega^{{n·{x}}} must vanish at p={pr}");
                }
            }
        }
    }

    #[test]
    fn phase_sum_rejects_near_misses() {
        let pp = p(3);
        // 1 + omega is not zero.
        let mut s = PhaseSum::zero(pp);
        s.add_phase(Phase::one(pp));
        s.add_phase(Phase::omega(pp, 1));
        assert!(!s.is_zero());
        // 1 + i is not zero at p = 2.
        let two = p(2);
        let mut t = PhaseSum::zero(two);
        t.add_phase(Phase::one(two));
        t.add_phase(Phase::i_pow(two, 1));
        assert!(!t.is_zero());
    }

    #[test]
    fn phase_sum_vanishes_for_rotated_full_sums() {
        // (1 + omega + omega²)·i = 0 at p = 3, exercising exponents off
        // the omega sublattice.
        let pp = p(3);
        let mut s = PhaseSum::zero(pp);
        for n in 0..3 {
            s.add_phase(Phase::omega(pp, n).mul(Phase::i_pow(pp, 1)));
        }
        assert!(s.is_zero());
    }

    #[test]
    fn phase_sum_to_complex_agrees() {
        let pp = p(5);
        let mut s = PhaseSum::zero(pp);
        s.add_scaled(Phase::omega(pp, 2), 3);
        s.add_scaled(Phase::i_pow(pp, 1), -1);
        let want = 3.0 * Phase::omega(pp, 2).to_complex() - Complex64::new(0.0, 1.0);
        assert!((s.to_complex() - want).norm() <= 1e-12);
    }
}
