//! Von Neumann dynamics of density matrices in phase-space
//! coefficients: the spin-chain Hamiltonian, the general
//! structure-constant contraction, its specialized qubit form, a
//! fixed-step RK4 integrator, and the tensor-product (mean-field)
//! reduction to per-site coefficient triples.
//!
//! Throughout, ħ = 1 and the equation of motion in a basis B is
//!
//!   dρ_B(α)/dt = -i (1/p^{2N}) Σ_{β,γ} Δ_{α,β,γ} H_B(β) ρ_B(γ)
//!
//! with Δ the antisymmetrized structure constants of the basis. The
//! qubit spin specialization evaluates the same right-hand side
//! directly from the coupling constants; every vector sum inside its
//! phase exponents is reduced mod 2 before the dot products are taken,
//! powers of i mod 4 and signs mod 2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::GammaTensor;
use crate::operator::{hermitian_eigenvalues, DenseOperator};
use crate::phase::Prime;
use crate::wigner::{coeffs_from_matrix, matrix_from_coeffs, Basis, CoeffGrid};
use crate::Caps;

/// Hermiticity tolerance for density-matrix validation.
pub const DENSITY_HERM_TOL: f64 = 1e-10;
/// Trace tolerance for density-matrix validation.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;
/// Eigenvalue floor for density-matrix validation.
pub const DENSITY_EIG_FLOOR: f64 = -1e-8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn two() -> Prime {
    Prime::new(2).expect("2 is prime")
}

/// A validated density matrix with phase-space coefficient views.
#[derive(Clone, Debug)]
pub struct DensityState {
    p: Prime,
    n_sites: usize,
    matrix: DenseOperator,
}

impl DensityState {
    /// Validates Hermiticity, unit trace, and positive semidefiniteness
    /// (eigenvalues above the round-off floor).
    pub fn from_matrix(p: Prime, n_sites: usize, matrix: DenseOperator) -> Result<Self> {
        let dim = (p.get() as usize).pow(n_sites as u32);
        if matrix.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimension {} against p^N = {dim}",
                matrix.dim()
            )));
        }
        let herm = matrix.hermiticity_violation();
        if herm > DENSITY_HERM_TOL {
            return Err(Error::InvalidDensity(format!(
                "Hermiticity violation {herm:.3e} exceeds {DENSITY_HERM_TOL:.0e}"
            )));
        }
        let trace = matrix.trace();
        if (trace - c(1.0, 0.0)).norm() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDensity(format!(
                "trace {trace} is not 1 within {DENSITY_TRACE_TOL:.0e}"
            )));
        }
        let eigs = hermitian_eigenvalues(&matrix, DENSITY_HERM_TOL)?;
        if let Some(&low) = eigs.first() {
            if low < DENSITY_EIG_FLOOR {
                return Err(Error::InvalidDensity(format!(
                    "lowest eigenvalue {low:.3e} below {DENSITY_EIG_FLOOR:.0e}"
                )));
            }
        }
        Ok(DensityState { p, n_sites, matrix })
    }

    /// Reconstructs the matrix from a coefficient grid and validates it.
    pub fn from_coeffs(grid: &CoeffGrid, basis: Basis) -> Result<Self> {
        Self::from_matrix(
            grid.prime(),
            grid.n_sites(),
            matrix_from_coeffs(grid, basis),
        )
    }

    /// Product state of qubits from per-site Bloch vectors [x, y, z],
    /// each with |r| ≤ 1.
    pub fn from_bloch(sites: &[[f64; 3]]) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one Bloch vector is required".into(),
            ));
        }
        let mut matrix: Option<DenseOperator> = None;
        for (k, r) in sites.iter().enumerate() {
            let norm2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
            if !(norm2 <= 1.0 + 1e-12) {
                return Err(Error::InvalidDensity(format!(
                    "Bloch vector for site {k} has |r| = {} > 1",
                    norm2.sqrt()
                )));
            }
            let site = DenseOperator::from_entries(
                2,
                vec![
                    c((1.0 + r[2]) / 2.0, 0.0),
                    c(r[0] / 2.0, -r[1] / 2.0),
                    c(r[0] / 2.0, r[1] / 2.0),
                    c((1.0 - r[2]) / 2.0, 0.0),
                ],
            );
            matrix = Some(match matrix {
                Some(m) => m.kron(&site),
                None => site,
            });
        }
        Self::from_matrix(two(), sites.len(), matrix.expect("nonempty"))
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
    pub fn matrix(&self) -> &DenseOperator {
        &self.matrix
    }

    pub fn coeffs(&self, basis: Basis) -> CoeffGrid {
        coeffs_from_matrix(self.p, self.n_sites, &self.matrix, basis)
            .expect("dimensions validated at construction")
    }
}

/// Coefficient grid of a density matrix, grid(x) = tr(B(x)† ρ).
pub fn coeffs_from_density(
    p: Prime,
    n_sites: usize,
    rho: &DenseOperator,
    basis: Basis,
) -> Result<CoeffGrid> {
    coeffs_from_matrix(p, n_sites, rho, basis)
}

/// Matrix reconstruction ρ = (1/p^N) Σ_x grid(x) B(x).
pub fn density_from_coeffs(grid: &CoeffGrid, basis: Basis) -> DenseOperator {
    matrix_from_coeffs(grid, basis)
}

/// tr(ρ²) computed from a coefficient grid by basis orthogonality.
pub fn grid_purity(grid: &CoeffGrid) -> f64 {
    grid.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / grid.dim() as f64
}

/// Largest imaginary part on the grid. For qubits the Fourier-Wigner
/// operators are Hermitian, so this is a cheap Hermiticity diagnostic:
/// a Hermitian matrix has an all-real FW grid.
pub fn grid_max_imag(grid: &CoeffGrid) -> f64 {
    grid.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max)
}

/// Transverse-field XXZ-type spin-chain Hamiltonian parameters:
/// H = ½ Σ_{i≠j} [ (J⊥_{ij}/2)(X_i X_j + Y_i Y_j) + J^z_{ij} Z_i Z_j ]
///     + Ω Σ_i X_i,   on N qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinHamiltonianSpec {
    n_sites: usize,
    jperp: Vec<f64>,
    jz: Vec<f64>,
    omega: f64,
}

impl SpinHamiltonianSpec {
    /// Coupling matrices are row-major N×N, symmetric with zero
    /// diagonal; all entries must be finite.
    pub fn new(n_sites: usize, jperp: Vec<f64>, jz: Vec<f64>, omega: f64) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidSpec("site count must be positive".into()));
        }
        if jperp.len() != n_sites * n_sites || jz.len() != n_sites * n_sites {
            return Err(Error::InvalidSpec(format!(
                "coupling matrices must be {n_sites}x{n_sites}"
            )));
        }
        if !omega.is_finite() || jperp.iter().chain(&jz).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("couplings must be finite".into()));
        }
        for (name, m) in [("jperp", &jperp), ("jz", &jz)] {
            for i in 0..n_sites {
                if m[i * n_sites + i] != 0.0 {
                    return Err(Error::InvalidSpec(format!("{name} diagonal must be zero")));
                }
                for j in 0..i {
                    if m[i * n_sites + j] != m[j * n_sites + i] {
                        return Err(Error::InvalidSpec(format!(
                            "{name} must be symmetric at ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(SpinHamiltonianSpec {
            n_sites,
            jperp,
            jz,
            omega,
        })
    }

    /// All distinct pairs share one J⊥ and one J^z value.
    pub fn uniform(n_sites: usize, jperp: f64, jz: f64, omega: f64) -> Result<Self> {
        let fill = |v: f64| {
            let mut m = vec![0.0; n_sites * n_sites];
            for i in 0..n_sites {
                for j in 0..n_sites {
                    if i != j {
                        m[i * n_sites + j] = v;
                    }
                }
            }
            m
        };
        Self::new(n_sites, fill(jperp), fill(jz), omega)
    }

    pub fn two_spin(jperp: f64, jz: f64, omega: f64) -> Result<Self> {
        Self::uniform(2, jperp, jz, omega)
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    #[inline]
    pub fn jperp(&self, i: usize, j: usize) -> f64 {
        self.jperp[i * self.n_sites + j]
    }

    #[inline]
    pub fn jz(&self, i: usize, j: usize) -> f64 {
        self.jz[i * self.n_sites + j]
    }

    #[inline]
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn is_zero(&self) -> bool {
        self.omega == 0.0 && self.jperp.iter().chain(&self.jz).all(|&v| v == 0.0)
    }
}

fn pauli_entries(which: usize) -> [Complex64; 4] {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    match which {
        0 => [l, o, o, l],
        1 => [o, l, l, o],                      // X
        2 => [o, c(0.0, -1.0), c(0.0, 1.0), o], // Y
        _ => [l, o, o, -l],                     // Z
    }
}

/// Kronecker product over n qubit sites with the given Pauli factors
/// (1 = X, 2 = Y, 3 = Z) at selected sites and identity elsewhere.
fn multi_pauli(n_sites: usize, factors: &[(usize, usize)]) -> DenseOperator {
    let mut acc: Option<DenseOperator> = None;
    for k in 0..n_sites {
        let which = factors
            .iter()
            .find(|(site, _)| *site == k)
            .map_or(0, |(_, w)| *w);
        let site = DenseOperator::from_entries(2, pauli_entries(which).to_vec());
        acc = Some(match acc {
            Some(m) => m.kron(&site),
            None => site,
        });
    }
    acc.expect("at least one site")
}

/// Dense 2^N × 2^N matrix of the spin-chain Hamiltonian.
pub fn build_hamiltonian(spec: &SpinHamiltonianSpec, caps: &Caps) -> Result<DenseOperator> {
    let n = spec.n_sites();
    let dim = caps.checked_dim(two(), n)?;
    let mut h = DenseOperator::zeros(dim);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let jp = spec.jperp(i, j);
            if jp != 0.0 {
                let hop = multi_pauli(n, &[(i, 1), (j, 1)]).add(&multi_pauli(n, &[(i, 2), (j, 2)]));
                h = h.add(&hop.scale(c(jp / 4.0, 0.0)));
            }
            let jz = spec.jz(i, j);
            if jz != 0.0 {
                h = h.add(&multi_pauli(n, &[(i, 3), (j, 3)]).scale(c(jz / 2.0, 0.0)));
            }
        }
    }
    if spec.omega() != 0.0 {
        for i in 0..n {
            h = h.add(&multi_pauli(n, &[(i, 1)]).scale(c(spec.omega(), 0.0)));
        }
    }
    Ok(h)
}

/// Bitmask with the bit of site k set, in the big-endian flat encoding
/// (site 0 is the most significant digit).
#[inline]
fn site_mask(n_sites: usize, k: usize) -> u64 {
    1u64 << (n_sites - 1 - k)
}

#[inline]
fn grid_flat(n_sites: usize, a1: u64, a2: u64) -> usize {
    ((a1 << n_sites) | a2) as usize
}

/// Fourier-Wigner coefficient grid of the spin-chain Hamiltonian,
/// accumulated per ordered pair i ≠ j:
/// (p^N/4) J⊥_{ij} at (e_i+e_j, 0) and at (e_i+e_j, e_i+e_j),
/// (p^N/2) J^z_{ij} at (0, e_i+e_j), and p^N Ω at each (e_i, 0).
pub fn hamiltonian_fw_coeffs(spec: &SpinHamiltonianSpec) -> CoeffGrid {
    let n = spec.n_sites();
    let mut grid = CoeffGrid::new(two(), n);
    let dimf = (1u64 << n) as f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let m = site_mask(n, i) | site_mask(n, j);
            let jp = spec.jperp(i, j) * dimf / 4.0;
            if jp != 0.0 {
                for flat in [grid_flat(n, m, 0), grid_flat(n, m, m)] {
                    grid.set(flat, grid.get(flat) + c(jp, 0.0));
                }
            }
            let jz = spec.jz(i, j) * dimf / 2.0;
            if jz != 0.0 {
                let flat = grid_flat(n, 0, m);
                grid.set(flat, grid.get(flat) + c(jz, 0.0));
            }
        }
    }
    if spec.omega() != 0.0 {
        for i in 0..n {
            let flat = grid_flat(n, site_mask(n, i), 0);
            grid.set(flat, grid.get(flat) + c(dimf * spec.omega(), 0.0));
        }
    }
    grid
}

/// dρ(α)/dt = -i (1/p^{2N}) Σ Δ_{α,β,γ} H(β) ρ(γ) for the basis the
/// tensor was built in.
pub fn rhs_general(tensor: &GammaTensor, h: &CoeffGrid, rho: &CoeffGrid) -> Result<CoeffGrid> {
    if tensor.prime() != h.prime()
        || tensor.prime() != rho.prime()
        || tensor.n_sites() != h.n_sites()
        || tensor.n_sites() != rho.n_sites()
    {
        return Err(Error::DimensionMismatch(
            "structure tensor and coefficient grids must share p and N".into(),
        ));
    }
    let mut out = CoeffGrid::new(h.prime(), h.n_sites());
    for ((a, b, g), v) in tensor.iter() {
        let add = v * h.get(b as usize) * rho.get(g as usize);
        out.set(a as usize, out.get(a as usize) + add);
    }
    let scale = c(0.0, -1.0) / (out.len() as f64);
    for v in out.values_mut() {
        *v *= scale;
    }
    Ok(out)
}

#[inline]
fn i_pow_c(k: u32) -> Complex64 {
    match k & 3 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    }
}

#[inline]
fn parity(k: u32) -> f64 {
    if k & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn spin_rhs_values(spec: &SpinHamiltonianSpec, vals: &[Complex64]) -> Vec<Complex64> {
    let n = spec.n_sites();
    let size = 1u64 << n;
    let pairs: Vec<(u64, f64, f64)> = (0..n)
        .flat_map(|i| (0..n).filter_map(move |j| if i == j { None } else { Some((i, j)) }))
        .map(|(i, j)| {
            (
                site_mask(n, i) | site_mask(n, j),
                spec.jperp(i, j),
                spec.jz(i, j),
            )
        })
        .collect();
    let omega = spec.omega();
    let mut out = vec![c(0.0, 0.0); vals.len()];
    for a1 in 0..size {
        for a2 in 0..size {
            let u = (a1 & a2).count_ones();
            let mut acc = c(0.0, 0.0);
            for &(m, jp, jz) in &pairs {
                if jp != 0.0 {
                    let h1 = a1 ^ m;
                    let s1 = (a2 & h1).count_ones();
                    let br = parity(u) - parity(s1);
                    if br != 0.0 {
                        acc += (jp / 4.0 * br) * i_pow_c(s1) * vals[grid_flat(n, h1, a2)];
                    }
                    let h2 = a2 ^ m;
                    let s2 = (h1 & h2).count_ones();
                    let br = parity((a2 & h1).count_ones()) - parity((a1 & h2).count_ones());
                    if br != 0.0 {
                        acc += (jp / 4.0 * br) * i_pow_c(s2) * vals[grid_flat(n, h1, h2)];
                    }
                }
                if jz != 0.0 {
                    let h3 = a2 ^ m;
                    let s3 = (a1 & h3).count_ones();
                    let br = parity(s3) - parity(u);
                    if br != 0.0 {
                        acc += (jz / 2.0 * br) * i_pow_c(s3) * vals[grid_flat(n, a1, h3)];
                    }
                }
            }
            if omega != 0.0 {
                for k in 0..n {
                    let h4 = a1 ^ site_mask(n, k);
                    let s4 = (a2 & h4).count_ones();
                    let br = parity(u) - parity(s4);
                    if br != 0.0 {
                        acc += (omega * br) * i_pow_c(s4) * vals[grid_flat(n, h4, a2)];
                    }
                }
            }
            // global i^{a1·a2} prefactor and division by iħ
            out[grid_flat(n, a1, a2)] = i_pow_c(u + 3) * acc;
        }
    }
    out
}

/// The qubit spin-chain right-hand side evaluated directly from the
/// coupling constants; agrees with `rhs_general` applied to
/// `hamiltonian_fw_coeffs`.
pub fn rhs_spin_fw(spec: &SpinHamiltonianSpec, rho: &CoeffGrid) -> Result<CoeffGrid> {
    if !rho.prime().is_two() {
        return Err(Error::RequiresQubits(rho.prime().get()));
    }
    if rho.n_sites() != spec.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "grid has {} sites, spec has {}",
            rho.n_sites(),
            spec.n_sites()
        )));
    }
    CoeffGrid::from_values(
        rho.prime(),
        rho.n_sites(),
        spin_rhs_values(spec, rho.values()),
    )
}

/// The three tracked coefficients of one site under the tensor-product
/// ansatz, named for the angular-momentum components they represent:
/// x = ρ_FW(e_k, 0), y = ρ_FW(e_k, e_k), z = ρ_FW(0, e_k).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SiteTriple {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

/// Reads the per-site triples out of a full qubit FW grid.
pub fn site_triples_of_grid(grid: &CoeffGrid) -> Result<Vec<SiteTriple>> {
    if !grid.prime().is_two() {
        return Err(Error::RequiresQubits(grid.prime().get()));
    }
    let n = grid.n_sites();
    Ok((0..n)
        .map(|k| {
            let e = site_mask(n, k);
            SiteTriple {
                x: grid.get(grid_flat(n, e, 0)),
                y: grid.get(grid_flat(n, e, e)),
                z: grid.get(grid_flat(n, 0, e)),
            }
        })
        .collect())
}

/// Mean-field (classical spin) equations for the per-site triples:
///
///   dx_k/dt = z_k Σ_{i≠k} J⊥_{ik} y_i - 2 y_k Σ_{i≠k} J^z_{ik} z_i
///   dz_k/dt = y_k Σ_{i≠k} J⊥_{ik} x_i - x_k Σ_{i≠k} J⊥_{ik} y_i + 2Ω y_k
///   dy_k/dt = -z_k Σ_{i≠k} J⊥_{ik} x_i + 2 x_k Σ_{i≠k} J^z_{ik} z_i - 2Ω z_k
pub fn meanfield_rhs(
    spec: &SpinHamiltonianSpec,
    triples: &[SiteTriple],
) -> Result<Vec<SiteTriple>> {
    if triples.len() != spec.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "{} triples against {} sites",
            triples.len(),
            spec.n_sites()
        )));
    }
    let n = triples.len();
    let omega = spec.omega();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut jp_x = c(0.0, 0.0);
        let mut jp_y = c(0.0, 0.0);
        let mut jz_z = c(0.0, 0.0);
        for (i, t) in triples.iter().enumerate() {
            if i == k {
                continue;
            }
            jp_x += spec.jperp(i, k) * t.x;
            jp_y += spec.jperp(i, k) * t.y;
            jz_z += spec.jz(i, k) * t.z;
        }
        let t = triples[k];
        out.push(SiteTriple {
            x: t.z * jp_y - 2.0 * t.y * jz_z,
            z: t.y * jp_x - t.x * jp_y + 2.0 * omega * t.y,
            y: -t.z * jp_x + 2.0 * t.x * jz_z - 2.0 * omega * t.z,
        });
    }
    Ok(out)
}

/// Full FW grid of a product state: every entry is the product of the
/// per-site single-site coefficients.
pub fn factorize_product_state(sites: &[CoeffGrid]) -> Result<CoeffGrid> {
    if sites.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one site grid is required".into(),
        ));
    }
    let p = sites[0].prime();
    for (k, site) in sites.iter().enumerate() {
        if site.n_sites() != 1 {
            return Err(Error::SingleSiteOnly(site.n_sites()));
        }
        if site.prime() != p {
            return Err(Error::DimensionMismatch(format!(
                "site {k} has a different prime"
            )));
        }
    }
    let n = sites.len();
    let pr = p.get() as usize;
    let mut out = CoeffGrid::new(p, n);
    for flat in 0..out.len() {
        let point = out.point_at(flat);
        let mut prod = c(1.0, 0.0);
        for (k, site) in sites.iter().enumerate() {
            let site_flat = point.a1.entry(k) as usize * pr + point.a2.entry(k) as usize;
            prod *= site.get(site_flat);
        }
        out.set(flat, prod);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Full,
    MeanField,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Full => "full",
            Method::MeanField => "meanfield",
        }
    }
}

/// One sampled state along a trajectory: the full FW grid, or the
/// per-site triples for the mean-field method.
#[derive(Clone, Debug)]
pub enum TrajectoryState {
    Full(CoeffGrid),
    MeanField(Vec<SiteTriple>),
}

/// Time series produced by `evolve`, sampled at every step.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<TrajectoryState>,
    pub method: Method,
    pub dt: f64,
}

impl Trajectory {
    /// Largest |ρ_FW(0,0) - 1| over full-method samples.
    pub fn trace_coefficient_drift(&self) -> f64 {
        self.states
            .iter()
            .filter_map(|s| match s {
                TrajectoryState::Full(grid) => Some((grid.get(0) - c(1.0, 0.0)).norm()),
                TrajectoryState::MeanField(_) => None,
            })
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part over all sampled coefficients.
    pub fn max_imag(&self) -> f64 {
        self.states
            .iter()
            .map(|s| match s {
                TrajectoryState::Full(grid) => grid_max_imag(grid),
                TrajectoryState::MeanField(triples) => triples
                    .iter()
                    .flat_map(|t| [t.x.im.abs(), t.y.im.abs(), t.z.im.abs()])
                    .fold(0.0, f64::max),
            })
            .fold(0.0, f64::max)
    }
}

fn has_bad_values(v: &[Complex64]) -> bool {
    v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
}

fn rk4_step<F: Fn(&[Complex64]) -> Vec<Complex64>>(
    f: &F,
    y: &[Complex64],
    dt: f64,
) -> Vec<Complex64> {
    let shift = |base: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        base.iter().zip(k).map(|(&b, &kv)| b + s * kv).collect()
    };
    let k1 = f(y);
    let k2 = f(&shift(y, &k1, dt / 2.0));
    let k3 = f(&shift(y, &k2, dt / 2.0));
    let k4 = f(&shift(y, &k3, dt));
    y.iter()
        .enumerate()
        .map(|(idx, &yv)| yv + dt / 6.0 * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]))
        .collect()
}

fn integrate<F, W>(
    initial: Vec<Complex64>,
    f: F,
    wrap: W,
    t_final: f64,
    dt: f64,
    method: Method,
) -> Result<Trajectory>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
    W: Fn(&[Complex64]) -> TrajectoryState,
{
    let mut times = vec![0.0];
    let mut states = vec![wrap(&initial)];
    let mut y = initial;
    let n_full = (t_final / dt + 1e-9).floor() as usize;
    for k in 1..=n_full {
        y = rk4_step(&f, &y, dt);
        let t = k as f64 * dt;
        if has_bad_values(&y) {
            return Err(Error::Numerical(format!(
                "integration produced a non-finite coefficient at t = {t:.6e}"
            )));
        }
        times.push(t);
        states.push(wrap(&y));
    }
    let t_last = n_full as f64 * dt;
    if t_final - t_last > 1e-12 * t_final.max(1.0) {
        y = rk4_step(&f, &y, t_final - t_last);
        if has_bad_values(&y) {
            return Err(Error::Numerical(format!(
                "integration produced a non-finite coefficient at t = {t_final:.6e}"
            )));
        }
        times.push(t_final);
        states.push(wrap(&y));
    }
    Ok(Trajectory {
        times,
        states,
        method,
        dt,
    })
}

/// Fixed-step RK4 evolution of a qubit state under the spin-chain
/// Hamiltonian, on the full FW grid or the mean-field triples.
pub fn evolve(
    initial: &DensityState,
    spec: &SpinHamiltonianSpec,
    t_final: f64,
    dt: f64,
    method: Method,
) -> Result<Trajectory> {
    if !initial.prime().is_two() {
        return Err(Error::RequiresQubits(initial.prime().get()));
    }
    if initial.n_sites() != spec.n_sites() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} sites, spec has {}",
            initial.n_sites(),
            spec.n_sites()
        )));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(Error::InvalidArgument("t_final must be nonnegative".into()));
    }
    let grid = initial.coeffs(Basis::FourierWigner);
    let n = spec.n_sites();
    match method {
        Method::Full => integrate(
            grid.values().to_vec(),
            |v| spin_rhs_values(spec, v),
            |v| {
                TrajectoryState::Full(
                    CoeffGrid::from_values(two(), n, v.to_vec()).expect("length preserved"),
                )
            },
            t_final,
            dt,
            method,
        ),
        Method::MeanField => {
            let triples = site_triples_of_grid(&grid)?;
            let flat: Vec<Complex64> = triples.iter().flat_map(|t| [t.x, t.z, t.y]).collect();
            let unflatten = |v: &[Complex64]| -> Vec<SiteTriple> {
                v.chunks_exact(3)
                    .map(|ch| SiteTriple {
                        x: ch[0],
                        z: ch[1],
                        y: ch[2],
                    })
                    .collect()
            };
            integrate(
                flat,
                move |v| {
                    meanfield_rhs(spec, &unflatten(v))
                        .expect("site count fixed")
                        .iter()
                        .flat_map(|t| [t.x, t.z, t.y])
                        .collect()
                },
                move |v| TrajectoryState::MeanField(unflatten(v)),
                t_final,
                dt,
                method,
            )
        }
    }
}
