//! Finite-geometry lines on the single-site phase plane Z_p², line
//! projectors, and verification of the trace, orthogonality, and line
//! conditions for the Wigner and Wootters operator families.
//!
//! A line ℓ_{n,m,k} is the set of points (x, y) with nx + my ≡ k
//! (mod p); the p + 1 parallel classes are represented by
//! (n, m) ∈ {(1, m)} ∪ {(0, 1)}. Averaging the operator family over a
//! line yields a projector P_ℓ = (1/p) Σ_{α ∈ ℓ} B(α); within one
//! class the projectors are orthogonal and resolve the identity.

use crate::error::{Error, Result};
use crate::operator::DenseOperator;
use crate::phase::{canonical_residue, PhasePoint, Prime};
use crate::wigner::{wigner_op, wootters_op};

/// Absolute entrywise tolerance for the projector algebra.
pub const LINE_TOL: f64 = 1e-12;

/// Which single-site operator family to average over lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Wigner,
    Wootters,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Wigner => "wigner",
            Family::Wootters => "wootters",
        }
    }
}

/// The family operator at a single-site point.
pub fn family_op(family: Family, point: &PhasePoint) -> Result<DenseOperator> {
    if point.n_sites() != 1 {
        return Err(Error::SingleSiteOnly(point.n_sites()));
    }
    Ok(match family {
        Family::Wigner => wigner_op(point),
        Family::Wootters => wootters_op(point)?,
    })
}

/// A line on Z_p²: all p points (x, y) with nx + my ≡ k (mod p).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    p: Prime,
    n: u64,
    m: u64,
    k: u64,
    points: Vec<PhasePoint>,
}

impl Line {
    /// Enumerates the line; coefficients are reduced mod p and the
    /// degenerate pair (n, m) ≡ (0, 0) is rejected.
    pub fn new(p: Prime, n: i64, m: i64, k: i64) -> Result<Self> {
        let pr = p.get();
        let (n, m, k) = (
            canonical_residue(n, pr),
            canonical_residue(m, pr),
            canonical_residue(k, pr),
        );
        if n == 0 && m == 0 {
            return Err(Error::DegenerateLine);
        }
        let mut points = Vec::with_capacity(pr as usize);
        for x in 0..pr {
            for y in 0..pr {
                if (n * x + m * y) % pr == k % pr {
                    points.push(PhasePoint::single(p, x as i64, y as i64));
                }
            }
        }
        debug_assert_eq!(points.len(), pr as usize);
        Ok(Line { p, n, m, k, points })
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn m(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn k(&self) -> u64 {
        self.k
    }

    #[inline]
    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn contains(&self, point: &PhasePoint) -> bool {
        self.points.iter().any(|q| q == point)
    }

    /// Set equality of the point sets (lines with proportional
    /// coefficients coincide).
    pub fn same_points(&self, other: &Line) -> bool {
        self.points.len() == other.points.len() && self.points.iter().all(|q| other.contains(q))
    }
}

/// Representatives (n, m) of the p + 1 parallel classes:
/// (1, 0), (1, 1), ..., (1, p-1), (0, 1). Proportional pairs define
/// the same lines, so each class appears exactly once.
pub fn parallel_class_representatives(p: Prime) -> Vec<(u64, u64)> {
    let mut reps: Vec<(u64, u64)> = (0..p.get()).map(|m| (1, m)).collect();
    reps.push((0, 1));
    reps
}

/// The p disjoint parallel lines of one class, k = 0..p-1.
#[derive(Clone, Debug)]
pub struct ParallelClass {
    pub n: u64,
    pub m: u64,
    pub lines: Vec<Line>,
}

pub fn parallel_class(p: Prime, n: i64, m: i64) -> Result<ParallelClass> {
    let lines = (0..p.get() as i64)
        .map(|k| Line::new(p, n, m, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ParallelClass {
        n: lines[0].n(),
        m: lines[0].m(),
        lines,
    })
}

/// P_ℓ = (1/p) Σ_{α ∈ ℓ} B(α).
pub fn line_projector(line: &Line, family: Family) -> Result<DenseOperator> {
    let dim = line.prime().get() as usize;
    let mut sum = DenseOperator::zeros(dim);
    for point in line.points() {
        sum = sum.add(&family_op(family, point)?);
    }
    Ok(sum.scale(num_complex::Complex64::new(1.0 / dim as f64, 0.0)))
}

/// Outcome of checking the line condition over every parallel class.
#[derive(Clone, Debug, Default)]
pub struct LineConditionReport {
    /// Worst deviation of P_{k1} P_{k2} from δ_{k1,k2} P_{k1}.
    pub max_projector_dev: f64,
    /// Worst deviation of Σ_k P_k from the identity, per class.
    pub max_resolution_dev: f64,
    /// Worst Hermiticity violation across all line projectors.
    pub max_hermiticity_dev: f64,
    /// Worst |tr P - 1| across all line projectors.
    pub max_trace_dev: f64,
    /// Violating (n, m, k1, k2) for the projector algebra.
    pub projector_violations: Vec<(u64, u64, u64, u64)>,
    /// Classes (n, m) whose projectors fail to resolve the identity.
    pub resolution_violations: Vec<(u64, u64)>,
}

impl LineConditionReport {
    pub fn passes(&self) -> bool {
        self.projector_violations.is_empty()
            && self.resolution_violations.is_empty()
            && self.max_hermiticity_dev <= LINE_TOL
            && self.max_trace_dev <= LINE_TOL
    }
}

/// Checks, for every parallel class, that the line projectors are
/// Hermitian, mutually orthogonal idempotents with unit trace that sum
/// to the identity.
pub fn verify_line_condition(p: Prime, family: Family) -> Result<LineConditionReport> {
    let dim = p.get() as usize;
    let identity = DenseOperator::identity(dim);
    let mut report = LineConditionReport::default();
    for (n, m) in parallel_class_representatives(p) {
        let class = parallel_class(p, n as i64, m as i64)?;
        let projectors = class
            .lines
            .iter()
            .map(|line| line_projector(line, family))
            .collect::<Result<Vec<_>>>()?;
        let mut sum = DenseOperator::zeros(dim);
        for (k1, proj) in projectors.iter().enumerate() {
            sum = sum.add(proj);
            report.max_hermiticity_dev =
                report.max_hermiticity_dev.max(proj.hermiticity_violation());
            let trace_dev = (proj.trace() - num_complex::Complex64::new(1.0, 0.0)).norm();
            report.max_trace_dev = report.max_trace_dev.max(trace_dev);
            for (k2, other) in projectors.iter().enumerate() {
                let product = proj.matmul(other);
                let expect = if k1 == k2 {
                    proj.clone()
                } else {
                    DenseOperator::zeros(dim)
                };
                let dev = product.max_abs_diff(&expect);
                report.max_projector_dev = report.max_projector_dev.max(dev);
                if dev > LINE_TOL {
                    report
                        .projector_violations
                        .push((n, m, k1 as u64, k2 as u64));
                }
            }
        }
        let dev = sum.max_abs_diff(&identity);
        report.max_resolution_dev = report.max_resolution_dev.max(dev);
        if dev > LINE_TOL {
            report.resolution_violations.push((n, m));
        }
    }
    Ok(report)
}

/// Composite report for the three operator-basis conditions:
/// unit trace, pairwise orthogonality, and the line condition.
#[derive(Clone, Debug)]
pub struct AxiomsReport {
    /// Worst |tr B(α) - 1|.
    pub trace_max_dev: f64,
    /// Worst deviation of tr(B(α)† B(β)) from p δ_{αβ}.
    pub orthogonality_max_dev: f64,
    pub line_condition: LineConditionReport,
}

impl AxiomsReport {
    pub fn trace_passes(&self) -> bool {
        self.trace_max_dev <= LINE_TOL
    }

    pub fn orthogonality_passes(&self) -> bool {
        self.orthogonality_max_dev <= LINE_TOL
    }

    pub fn passes(&self) -> bool {
        self.trace_passes() && self.orthogonality_passes() && self.line_condition.passes()
    }
}

/// Verifies all three conditions for the chosen family at a prime.
pub fn verify_wootters_axioms(p: Prime, family: Family) -> Result<AxiomsReport> {
    let dim = p.get() as usize;
    let ops = (0..dim * dim)
        .map(|flat| family_op(family, &PhasePoint::from_flat(p, 1, flat)))
        .collect::<Result<Vec<_>>>()?;

    let mut trace_max_dev = 0.0f64;
    for op in &ops {
        trace_max_dev =
            trace_max_dev.max((op.trace() - num_complex::Complex64::new(1.0, 0.0)).norm());
    }

    let mut orthogonality_max_dev = 0.0f64;
    for (x, a) in ops.iter().enumerate() {
        for (y, b) in ops.iter().enumerate() {
            let want = if x == y { dim as f64 } else { 0.0 };
            let dev = (a.trace_inner(b) - num_complex::Complex64::new(want, 0.0)).norm();
            orthogonality_max_dev = orthogonality_max_dev.max(dev);
        }
    }

    Ok(AxiomsReport {
        trace_max_dev,
        orthogonality_max_dev,
        line_condition: verify_line_condition(p, family)?,
    })
}
