//! The Fourier-Wigner, discrete Wigner, and Wootters operator families,
//! and coefficient grids over phase space.
//!
//! Single-site definitions (ω = e^{2πi/p}):
//!
//! * FW(a1, a2) = ω^{2^{-1} a1 a2} D(a1, a2) for odd p, where 2^{-1} is
//!   the modular inverse of 2; FW(a1, a2) = i^{a1 a2} D(a1, a2) for
//!   p = 2, which makes the family {I, Z, X, Y}.
//! * W(a1, a2) is defined for every p as the inverse Fourier sum
//!   (1/p^N) Σ_b ω^{-(a1·b1 + a2·b2)} FW(b1, b2). For odd p it
//!   collapses to the monomial form ω^{-2 a1 a2} D(2 a2, -2 a1) U,
//!   which is exposed separately and checked against the sum.
//! * The Wootters phase-space-point operator A_α (single site) is the
//!   0/1-supported matrix (A_α)_{jk} = δ_{2a1, j+k} ω^{a2 (j-k)} for
//!   odd p and ½(I + (-1)^{a1} Z + (-1)^{a2} X + (-1)^{a1+a2} Y) for
//!   p = 2; it coincides with W(a2, -a1).
//!
//! Many-body operators are Kronecker products over sites, site 0
//! leftmost. Coefficient grids are indexed by the flattening
//! (a1 as base-p integer) · p^N + (a2 as base-p integer).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg_weyl::{displacement_monomial, flip_monomial};
use crate::operator::{DenseOperator, MonomialOp};
use crate::phase::{canonical_residue, half_inverse, HalfInverse, Phase, PhasePoint, Prime};
use crate::Caps;

/// Which operator family a coefficient grid refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Wigner,
    FourierWigner,
}

impl Basis {
    pub fn tag(self) -> &'static str {
        match self {
            Basis::Wigner => "w",
            Basis::FourierWigner => "fw",
        }
    }
}

fn site_fourier_wigner(p: Prime, a1: u64, a2: u64) -> MonomialOp {
    let d = displacement_monomial(&PhasePoint::single(p, a1 as i64, a2 as i64));
    let phase = match half_inverse(p) {
        HalfInverse::Modular(inv2) => Phase::omega(p, (inv2 * a1 * a2) as i64),
        HalfInverse::HalfAsI => Phase::i_pow(p, (a1 * a2) as i64),
    };
    d.scaled(phase)
}

/// The Fourier-Wigner operator at a point, as an exact monomial.
pub fn fourier_wigner_monomial(point: &PhasePoint) -> MonomialOp {
    assert!(point.n_sites() >= 1, "operator needs at least one site");
    let p = point.prime();
    let mut acc: Option<MonomialOp> = None;
    for k in 0..point.n_sites() {
        let site = site_fourier_wigner(p, point.a1.entry(k), point.a2.entry(k));
        acc = Some(match acc {
            Some(m) => m.kron(&site),
            None => site,
        });
    }
    acc.expect("at least one site")
}

pub fn fourier_wigner_op(point: &PhasePoint) -> DenseOperator {
    DenseOperator::from_monomial(fourier_wigner_monomial(point))
}

/// Table of ω^k as complex values, k ∈ [0, p).
fn omega_table(p: Prime) -> Vec<Complex64> {
    (0..p.get() as i64)
        .map(|k| Phase::omega(p, k).to_complex())
        .collect()
}

/// The discrete Wigner operator, by its defining inverse Fourier sum
/// over the Fourier-Wigner family (every p).
pub fn wigner_op(point: &PhasePoint) -> DenseOperator {
    let p = point.prime();
    let n = point.n_sites();
    let dim = (p.get() as usize).pow(n as u32);
    let table = omega_table(p);
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for flat in 0..dim * dim {
        let beta = PhasePoint::from_flat(p, n, flat);
        let expo = point.a1.dot(&beta.a1) + point.a2.dot(&beta.a2);
        let coeff = table[canonical_residue(-expo, p.get()) as usize];
        let mono = fourier_wigner_monomial(&beta);
        for col in 0..dim {
            entries[mono.row_of_col(col) * dim + col] +=
                coeff * mono.phase_of_col(col).to_complex();
        }
    }
    let scale = 1.0 / dim as f64;
    for e in &mut entries {
        *e *= scale;
    }
    DenseOperator::from_entries(dim, entries)
}

/// The closed monomial form W(a1, a2) = ω^{-2 a1·a2} D(2 a2, -2 a1) U,
/// valid for odd p.
pub fn wigner_closed_monomial(point: &PhasePoint) -> Result<MonomialOp> {
    let p = point.prime();
    if p.is_two() {
        return Err(Error::RequiresOddPrime);
    }
    let d_point = PhasePoint::new(point.a2.scale(2), point.a1.scale(-2));
    let phase = Phase::omega(p, -2 * point.a1.dot(&point.a2));
    let u = flip_monomial(p, point.n_sites());
    Ok(displacement_monomial(&d_point).compose(&u).scaled(phase))
}

fn pauli_entries(which: usize) -> [Complex64; 4] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match which {
        0 => [l, o, o, l],  // I
        1 => [l, o, o, -l], // Z
        2 => [o, l, l, o],  // X
        _ => [o, -i, i, o], // Y
    }
}

/// The Wootters phase-space-point operator A_α, single site only.
pub fn wootters_op(point: &PhasePoint) -> Result<DenseOperator> {
    if point.n_sites() != 1 {
        return Err(Error::SingleSiteOnly(point.n_sites()));
    }
    let p = point.prime();
    let (a1, a2) = (point.a1.entry(0), point.a2.entry(0));
    if p.is_two() {
        let signs = [
            1.0,
            if a1 % 2 == 0 { 1.0 } else { -1.0 },
            if a2 % 2 == 0 { 1.0 } else { -1.0 },
            if (a1 + a2) % 2 == 0 { 1.0 } else { -1.0 },
        ];
        let mut entries = [Complex64::new(0.0, 0.0); 4];
        for (which, sign) in signs.iter().enumerate() {
            for (e, v) in entries.iter_mut().zip(pauli_entries(which)) {
                *e += 0.5 * sign * v;
            }
        }
        return Ok(DenseOperator::from_entries(2, entries.to_vec()));
    }
    // (A_α)_{jk} = δ_{2a1, j+k} ω^{a2 (j-k)}: column k pairs with row
    // j = 2a1 - k, an involution, so the operator is monomial.
    let dim = p.get();
    let mut rows = Vec::with_capacity(dim as usize);
    let mut phases = Vec::with_capacity(dim as usize);
    for k in 0..dim as i64 {
        let j = canonical_residue(2 * a1 as i64 - k, dim);
        rows.push(j as u32);
        phases.push(Phase::omega(p, a2 as i64 * (j as i64 - k)));
    }
    Ok(DenseOperator::from_monomial(MonomialOp::new(
        p, rows, phases,
    )))
}

/// A complex coefficient grid over the phase-space points [p]^{2N}.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffGrid {
    p: Prime,
    n_sites: usize,
    values: Vec<Complex64>,
}

impl CoeffGrid {
    pub fn new(p: Prime, n_sites: usize) -> Self {
        let dim = (p.get() as usize).pow(n_sites as u32);
        CoeffGrid {
            p,
            n_sites,
            values: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn from_values(p: Prime, n_sites: usize, values: Vec<Complex64>) -> Result<Self> {
        let dim = (p.get() as usize).pow(n_sites as u32);
        if values.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "coefficient grid for p={p}, N={n_sites} needs {} values, got {}",
                dim * dim,
                values.len()
            )));
        }
        Ok(CoeffGrid { p, n_sites, values })
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// The operator dimension p^N.
    #[inline]
    pub fn dim(&self) -> usize {
        (self.p.get() as usize).pow(self.n_sites as u32)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, flat: usize) -> Complex64 {
        self.values[flat]
    }

    #[inline]
    pub fn set(&mut self, flat: usize, v: Complex64) {
        self.values[flat] = v;
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn point_at(&self, flat: usize) -> PhasePoint {
        PhasePoint::from_flat(self.p, self.n_sites, flat)
    }

    pub fn flat_of(&self, point: &PhasePoint) -> usize {
        assert_eq!(point.prime(), self.p, "grid/point prime mismatch");
        assert_eq!(point.n_sites(), self.n_sites, "grid/point site mismatch");
        point.flat_index()
    }

    pub fn value_at(&self, point: &PhasePoint) -> Complex64 {
        self.values[self.flat_of(point)]
    }

    pub fn set_at(&mut self, point: &PhasePoint, v: Complex64) {
        let flat = self.flat_of(point);
        self.values[flat] = v;
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.values.len(), rhs.values.len(), "grid size mismatch");
        self.values
            .iter()
            .zip(&rhs.values)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

fn grid_transform(grid: &CoeffGrid, direction: Direction, symplectic: bool) -> CoeffGrid {
    let p = grid.prime();
    let n = grid.n_sites();
    let table = omega_table(p);
    let sign = match direction {
        Direction::Forward => 1i64,
        Direction::Inverse => -1,
    };
    let points: Vec<PhasePoint> = (0..grid.len()).map(|f| grid.point_at(f)).collect();
    let norm = 1.0 / grid.dim() as f64;
    let mut out = CoeffGrid::new(p, n);
    for (af, alpha) in points.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (bf, beta) in points.iter().enumerate() {
            let expo = if symplectic {
                alpha.a1.dot(&beta.a2) - alpha.a2.dot(&beta.a1)
            } else {
                alpha.a1.dot(&beta.a1) + alpha.a2.dot(&beta.a2)
            };
            acc += table[canonical_residue(sign * expo, p.get()) as usize] * grid.get(bf);
        }
        out.set(af, norm * acc);
    }
    out
}

/// Fourier transform of a coefficient grid,
/// out(α) = (1/p^N) Σ_β ω^{±(α1·β1 + α2·β2)} in(β).
pub fn fourier_grid(grid: &CoeffGrid, direction: Direction) -> CoeffGrid {
    grid_transform(grid, direction, false)
}

/// Symplectic Fourier transform of a coefficient grid,
/// out(α) = (1/p^N) Σ_β ω^{±(α1·β2 - α2·β1)} in(β).
///
/// Because the kernel is antisymmetric, each direction is its own
/// inverse (an involution), while composing opposite directions yields
/// the parity map α ↦ -α; the two statements coincide at p = 2.
pub fn symplectic_fourier_grid(grid: &CoeffGrid, direction: Direction) -> CoeffGrid {
    grid_transform(grid, direction, true)
}

/// The full operator family of a basis, flat-ordered.
///
/// Materializes p^{2N} dense operators of dimension p^N; intended for
/// the small dimensions the caps admit.
pub struct BasisSet {
    p: Prime,
    n_sites: usize,
    basis: Basis,
    ops: Vec<DenseOperator>,
}

impl BasisSet {
    pub fn build(p: Prime, n_sites: usize, basis: Basis, caps: &Caps) -> Result<Self> {
        let dim = caps.checked_dim(p, n_sites)?;
        let ops = (0..dim * dim)
            .map(|flat| {
                let point = PhasePoint::from_flat(p, n_sites, flat);
                match basis {
                    Basis::Wigner => wigner_op(&point),
                    Basis::FourierWigner => fourier_wigner_op(&point),
                }
            })
            .collect();
        Ok(BasisSet {
            p,
            n_sites,
            basis,
            ops,
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

    #[inline]
    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    #[inline]
    pub fn op(&self, flat: usize) -> &DenseOperator {
        &self.ops[flat]
    }

    /// Coefficients grid(x) = tr(B(x)† m).
    pub fn coeffs_of(&self, m: &DenseOperator) -> CoeffGrid {
        let mut grid = CoeffGrid::new(self.p, self.n_sites);
        for (flat, op) in self.ops.iter().enumerate() {
            grid.set(flat, op.trace_inner(m));
        }
        grid
    }

    /// Reconstruction m = (1/p^N) Σ_x grid(x) B(x).
    pub fn reconstruct(&self, grid: &CoeffGrid) -> DenseOperator {
        let dim = self.dim();
        let mut out = DenseOperator::zeros(dim);
        for (flat, op) in self.ops.iter().enumerate() {
            let c = grid.get(flat);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for row in 0..dim {
                for col in 0..dim {
                    let v = out.entry(row, col) + c * op.entry(row, col);
                    out.set_entry(row, col, v);
                }
            }
        }
        out.scale(Complex64::new(1.0 / dim as f64, 0.0))
    }
}

/// Streaming version of tr(B(x)† m) that never materializes the Wigner
/// family: Wigner coefficients are obtained from the Fourier-Wigner
/// ones by the forward grid Fourier transform.
pub fn coeffs_from_matrix(
    p: Prime,
    n_sites: usize,
    m: &DenseOperator,
    basis: Basis,
) -> Result<CoeffGrid> {
    let dim = (p.get() as usize).pow(n_sites as u32);
    if m.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "matrix of dimension {} against p^N = {dim}",
            m.dim()
        )));
    }
    let mut fw = CoeffGrid::new(p, n_sites);
    for flat in 0..fw.len() {
        let mono = fourier_wigner_monomial(&PhasePoint::from_flat(p, n_sites, flat));
        // tr(B† m) = Σ_col conj(B[row, col]) m[row, col]
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..dim {
            let row = mono.row_of_col(col);
            acc += mono.phase_of_col(col).to_complex().conj() * m.entry(row, col);
        }
        fw.set(flat, acc);
    }
    Ok(match basis {
        Basis::FourierWigner => fw,
        Basis::Wigner => fourier_grid(&fw, Direction::Forward),
    })
}

/// Streaming reconstruction m = (1/p^N) Σ_x grid(x) B(x).
pub fn matrix_from_coeffs(grid: &CoeffGrid, basis: Basis) -> DenseOperator {
    let fw = match basis {
        Basis::FourierWigner => grid.clone(),
        Basis::Wigner => fourier_grid(grid, Direction::Inverse),
    };
    let p = fw.prime();
    let n = fw.n_sites();
    let dim = fw.dim();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for flat in 0..fw.len() {
        let c = fw.get(flat);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mono = fourier_wigner_monomial(&PhasePoint::from_flat(p, n, flat));
        for col in 0..dim {
            entries[mono.row_of_col(col) * dim + col] += c * mono.phase_of_col(col).to_complex();
        }
    }
    let scale = 1.0 / dim as f64;
    for e in &mut entries {
        *e *= scale;
    }
    DenseOperator::from_entries(dim, entries)
}

/// Largest deviation across both identification identities for the
/// Wootters operators at a given prime (single site):
/// A_α = W(-a2, a1) and A_α = (1/p) Σ_b ω^{-(a1 b2 - a2 b1)} FW(b).
/// The rotation follows from the element formulas: both sides map
/// column j to row 2a1 - j with entry ω^{2 a1 a2 - 2 a2 j}.
pub fn wootters_identification_max_dev(p: Prime) -> Result<f64> {
    let mut worst = 0.0f64;
    let dim = p.get() as usize;
    for flat in 0..dim * dim {
        let alpha = PhasePoint::from_flat(p, 1, flat);
        let a = wootters_op(&alpha)?;

        let rotated = PhasePoint::new(alpha.a2.neg(), alpha.a1.clone());
        worst = worst.max(a.max_abs_diff(&wigner_op(&rotated)));

        let (a1, a2) = (alpha.a1.entry(0) as i64, alpha.a2.entry(0) as i64);
        let mut sum = DenseOperator::zeros(dim);
        for bf in 0..dim * dim {
            let beta = PhasePoint::from_flat(p, 1, bf);
            let (b1, b2) = (beta.a1.entry(0) as i64, beta.a2.entry(0) as i64);
            let coeff = Phase::omega(p, -(a1 * b2 - a2 * b1)).to_complex();
            sum = sum.add(&fourier_wigner_op(&beta).scale(coeff));
        }
        sum = sum.scale(Complex64::new(1.0 / dim as f64, 0.0));
        worst = worst.max(a.max_abs_diff(&sum));
    }
    Ok(worst)
}

/// True iff both identification identities hold to 1e-12.
pub fn wootters_identification_check(p: Prime) -> Result<bool> {
    Ok(wootters_identification_max_dev(p)? <= 1e-12)
}
