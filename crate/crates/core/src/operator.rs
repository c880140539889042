//! Dense complex operators with an optional exact monomial view.
//!
//! Displacement operators, flip operators, Fourier-Wigner operators,
//! and their products are all monomial matrices: exactly one nonzero
//! per row and column, each a unit phase. [`MonomialOp`] stores that
//! structure exactly ([`crate::phase::Phase`] entries); [`DenseOperator`]
//! is the general complex matrix and keeps the monomial view alongside
//! whenever the operator has one, so algebraic laws can be checked
//! without tolerances while numerical code sees plain `Complex64`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase::{Phase, PhaseSum, Prime};

/// A generalized permutation matrix Σ_j φ_j |r_j⟩⟨j| with unit phases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialOp {
    p: Prime,
    row_of_col: Vec<u32>,
    phase_of_col: Vec<Phase>,
}

impl MonomialOp {
    /// Builds from the row index and phase of each column.
    ///
    /// # Panics
    ///
    /// Panics if the row assignment is not a permutation.
    pub fn new(p: Prime, row_of_col: Vec<u32>, phase_of_col: Vec<Phase>) -> Self {
        assert_eq!(row_of_col.len(), phase_of_col.len());
        let dim = row_of_col.len();
        let mut seen = vec![false; dim];
        for &r in &row_of_col {
            assert!((r as usize) < dim && !seen[r as usize], "rows must permute");
            seen[r as usize] = true;
        }
        MonomialOp {
            p,
            row_of_col,
            phase_of_col,
        }
    }

    pub fn identity(p: Prime, dim: usize) -> Self {
        MonomialOp {
            p,
            row_of_col: (0..dim as u32).collect(),
            phase_of_col: vec![Phase::one(p); dim],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.row_of_col.len()
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn row_of_col(&self, col: usize) -> usize {
        self.row_of_col[col] as usize
    }

    #[inline]
    pub fn phase_of_col(&self, col: usize) -> Phase {
        self.phase_of_col[col]
    }

    /// Matrix product `self · rhs`, exact.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim(), rhs.dim(), "monomial product dimension mismatch");
        assert_eq!(self.p, rhs.p, "monomial product across primes");
        let dim = self.dim();
        let mut row_of_col = Vec::with_capacity(dim);
        let mut phase_of_col = Vec::with_capacity(dim);
        for j in 0..dim {
            let mid = rhs.row_of_col[j] as usize;
            row_of_col.push(self.row_of_col[mid]);
            phase_of_col.push(self.phase_of_col[mid].mul(rhs.phase_of_col[j]));
        }
        MonomialOp {
            p: self.p,
            row_of_col,
            phase_of_col,
        }
    }

    /// Conjugate transpose, exact.
    pub fn dagger(&self) -> Self {
        let dim = self.dim();
        let mut row_of_col = vec![0u32; dim];
        let mut phase_of_col = vec![Phase::one(self.p); dim];
        for j in 0..dim {
            let r = self.row_of_col[j] as usize;
            row_of_col[r] = j as u32;
            phase_of_col[r] = self.phase_of_col[j].conj();
        }
        MonomialOp {
            p: self.p,
            row_of_col,
            phase_of_col,
        }
    }

    /// Kronecker product with `self` as the leftmost (site-0) factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        assert_eq!(self.p, rhs.p, "kron across primes");
        let (da, db) = (self.dim(), rhs.dim());
        let mut row_of_col = Vec::with_capacity(da * db);
        let mut phase_of_col = Vec::with_capacity(da * db);
        for ja in 0..da {
            for jb in 0..db {
                let r = self.row_of_col[ja] as usize * db + rhs.row_of_col[jb] as usize;
                row_of_col.push(r as u32);
                phase_of_col.push(self.phase_of_col[ja].mul(rhs.phase_of_col[jb]));
            }
        }
        MonomialOp {
            p: self.p,
            row_of_col,
            phase_of_col,
        }
    }

    /// Multiplies every entry by a fixed phase, exact.
    pub fn scaled(&self, ph: Phase) -> Self {
        MonomialOp {
            p: self.p,
            row_of_col: self.row_of_col.clone(),
            phase_of_col: self.phase_of_col.iter().map(|&q| q.mul(ph)).collect(),
        }
    }

    /// Trace as an exact formal sum of phases.
    pub fn trace(&self) -> PhaseSum {
        let mut s = PhaseSum::zero(self.p);
        for j in 0..self.dim() {
            if self.row_of_col[j] as usize == j {
                s.add_phase(self.phase_of_col[j]);
            }
        }
        s
    }

    pub fn to_entries(&self) -> Vec<Complex64> {
        let dim = self.dim();
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            entries[self.row_of_col[j] as usize * dim + j] = self.phase_of_col[j].to_complex();
        }
        entries
    }
}

/// A dim × dim complex matrix, row-major, with the monomial view
/// attached when the operator has exact phase entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex64>,
    exact: Option<MonomialOp>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
            exact: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.entries[k * dim + k] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// # Panics
    ///
    /// Panics unless `entries.len() == dim²`.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim²");
        DenseOperator {
            dim,
            entries,
            exact: None,
        }
    }

    pub fn from_monomial(m: MonomialOp) -> Self {
        DenseOperator {
            dim: m.dim(),
            entries: m.to_entries(),
            exact: Some(m),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set_entry(&mut self, row: usize, col: usize, v: Complex64) {
        self.exact = None;
        self.entries[row * self.dim + col] = v;
    }

    /// The exact monomial view, when the operator has one.
    #[inline]
    pub fn exact(&self) -> Option<&MonomialOp> {
        self.exact.as_ref()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let dim = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let aik = self.entries[i * dim + k];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rrow = &rhs.entries[k * dim..(k + 1) * dim];
                let orow = &mut out[i * dim..(i + 1) * dim];
                for j in 0..dim {
                    orow[j] += aik * rrow[j];
                }
            }
        }
        DenseOperator {
            dim,
            entries: out,
            exact: match (&self.exact, &rhs.exact) {
                (Some(a), Some(b)) => Some(a.compose(b)),
                _ => None,
            },
        }
    }

    pub fn dagger(&self) -> Self {
        let dim = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                out[j * dim + i] = self.entries[i * dim + j].conj();
            }
        }
        DenseOperator {
            dim,
            entries: out,
            exact: self.exact.as_ref().map(MonomialOp::dagger),
        }
    }

    /// Kronecker product with `self` as the leftmost (site-0) factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (da, db) = (self.dim, rhs.dim);
        let dim = da * db;
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for ia in 0..da {
            for ja in 0..da {
                let a = self.entries[ia * da + ja];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        out[(ia * db + ib) * dim + (ja * db + jb)] = a * rhs.entries[ib * db + jb];
                    }
                }
            }
        }
        DenseOperator {
            dim,
            entries: out,
            exact: match (&self.exact, &rhs.exact) {
                (Some(a), Some(b)) => Some(a.kron(b)),
                _ => None,
            },
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        DenseOperator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
            exact: None,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        DenseOperator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
            exact: None,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        DenseOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|&a| c * a).collect(),
            exact: None,
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self.entries[k * self.dim + k]).sum()
    }

    /// Hilbert-Schmidt inner product tr(self† rhs).
    pub fn trace_inner(&self, rhs: &Self) -> Complex64 {
        assert_eq!(self.dim, rhs.dim, "trace_inner dimension mismatch");
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| a.conj() * b)
            .sum()
    }

    /// Trace of the plain product tr(self · rhs).
    pub fn trace_product(&self, rhs: &Self) -> Complex64 {
        assert_eq!(self.dim, rhs.dim, "trace_product dimension mismatch");
        let dim = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc += self.entries[i * dim + j] * rhs.entries[j * dim + i];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim, "max_abs_diff dimension mismatch");
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |A - A†| over entries.
    pub fn hermiticity_violation(&self) -> f64 {
        let dim = self.dim;
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let d = (self.entries[i * dim + j] - self.entries[j * dim + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// max |A†A - I| over entries.
    pub fn unitarity_violation(&self) -> f64 {
        self.dagger()
            .matmul(self)
            .max_abs_diff(&DenseOperator::identity(self.dim))
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi
/// rotations. Errors if the input is not Hermitian to within `herm_tol`
/// or if the sweep fails to converge.
pub fn hermitian_eigenvalues(op: &DenseOperator, herm_tol: f64) -> Result<Vec<f64>> {
    let dim = op.dim();
    if op.hermiticity_violation() > herm_tol {
        return Err(Error::Numerical(format!(
            "hermitian_eigenvalues: input deviates from Hermitian by {:.3e}",
            op.hermiticity_violation()
        )));
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    let mut a = op.entries().to_vec();
    let scale = op.max_abs().max(1.0);
    let target = (1e-15 * scale).powi(2) * (dim * dim) as f64;

    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                off += a[i * dim + j].norm_sqr();
            }
        }
        if off <= target {
            let mut eig: Vec<f64> = (0..dim).map(|k| a[k * dim + k].re).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
            return Ok(eig);
        }
        for pi in 0..dim {
            for qi in (pi + 1)..dim {
                let apq = a[pi * dim + qi];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = a[pi * dim + pi].re;
                let aqq = a[qi * dim + qi].re;
                // Unit phase of the off-diagonal entry and the Jacobi
                // angle that zeroes it.
                let u = apq / mag;
                let tau = (app - aqq) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // A <- U† A U with U = [[c, -s·u],[s·ū, c]] on (p, q).
                for k in 0..dim {
                    let akp = a[k * dim + pi];
                    let akq = a[k * dim + qi];
                    a[k * dim + pi] = c * akp + s * u.conj() * akq;
                    a[k * dim + qi] = -s * u * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[pi * dim + k];
                    let aqk = a[qi * dim + k];
                    a[pi * dim + k] = c * apk + s * u * aqk;
                    a[qi * dim + k] = -s * u.conj() * apk + c * aqk;
                }
                // Clean up the rotated pair against drift.
                a[pi * dim + qi] = Complex64::new(0.0, 0.0);
                a[qi * dim + pi] = Complex64::new(0.0, 0.0);
                let hpp = a[pi * dim + pi];
                let hqq = a[qi * dim + qi];
                a[pi * dim + pi] = Complex64::new(hpp.re, 0.0);
                a[qi * dim + qi] = Complex64::new(hqq.re, 0.0);
            }
        }
    }
    Err(Error::Numerical(
        "hermitian_eigenvalues: Jacobi sweeps did not converge".into(),
    ))
}
