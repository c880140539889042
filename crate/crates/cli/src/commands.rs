//! Subcommand implementations.
//!
//! Each command returns its process exit code: 0 when every requested
//! check passes or the artifact is written, 1 when a verification
//! fails; hard errors surface as `CliError` and map to codes 2-4.

use std::path::PathBuf;

use clap::{ArgGroup, Args, ValueEnum};

use qps_core::dynamics::{evolve, Method};
use qps_core::gamma::{antisymmetrized_nnz, gamma_fw_closed, gamma_w_closed, GammaTensor};
use qps_core::heisenberg_weyl::{
    adjoint_law_holds, composition_law_holds, flip_conjugation_holds, hw_orthogonality,
};
use qps_core::lines::{verify_wootters_axioms, Family, LINE_TOL};
use qps_core::wigner::{coeffs_from_matrix, fourier_grid, matrix_from_coeffs, BasisSet, Direction};
use qps_core::{Basis, Caps, Error, PhasePoint, Prime};

use crate::config;
use crate::error::{CliError, Result};
use crate::io;

/// Tolerance for the closed-form versus brute-force comparison.
const GAMMA_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyChoice {
    Wigner,
    Wootters,
}

impl FamilyChoice {
    fn to_family(self) -> Family {
        match self {
            FamilyChoice::Wigner => Family::Wigner,
            FamilyChoice::Wootters => Family::Wootters,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GridBasisChoice {
    W,
    Fw,
}

impl GridBasisChoice {
    fn to_basis(self) -> Basis {
        match self {
            GridBasisChoice::W => Basis::Wigner,
            GridBasisChoice::Fw => Basis::FourierWigner,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReprChoice {
    Matrix,
    W,
    Fw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Full,
    Meanfield,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WhatChoice {
    Group,
    Axioms,
    All,
}

/// Resource-cap overrides shared by every subcommand. Precedence:
/// flag, then the QPS_CAP environment variable (`DIM` or
/// `DIM,TRIPLES`), then the library defaults.
#[derive(Args, Debug)]
pub struct CapArgs {
    /// Cap on the operator dimension p^N.
    #[arg(long, value_name = "DIM")]
    max_dim: Option<u64>,

    /// Cap on enumerated structure-constant triples.
    #[arg(long, value_name = "COUNT")]
    max_triples: Option<u64>,
}

impl CapArgs {
    pub fn resolve(&self) -> Result<Caps> {
        let mut caps = Caps::default();
        if let Ok(raw) = std::env::var("QPS_CAP") {
            let raw = raw.trim();
            if !raw.is_empty() {
                let mut parts = raw.split(',');
                let bad =
                    || CliError::Config(format!("QPS_CAP must be DIM or DIM,TRIPLES, got {raw:?}"));
                caps.max_dim = parts
                    .next()
                    .ok_or_else(bad)?
                    .trim()
                    .parse()
                    .map_err(|_| bad())?;
                if let Some(t) = parts.next() {
                    caps.max_triples = t.trim().parse().map_err(|_| bad())?;
                }
                if parts.next().is_some() {
                    return Err(bad());
                }
            }
        }
        if let Some(d) = self.max_dim {
            caps.max_dim = d;
        }
        if let Some(t) = self.max_triples {
            caps.max_triples = t;
        }
        Ok(caps)
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// `verify`: exact group-law checks and operator-basis axiom checks.
#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Prime dimension of one site.
    #[arg(long)]
    p: u64,

    /// Number of sites for the group-law checks (axioms are single-site).
    #[arg(long, default_value_t = 1)]
    n: usize,

    /// Operator family checked against the axioms.
    #[arg(long, value_enum, default_value_t = FamilyChoice::Wigner)]
    basis: FamilyChoice,

    /// Which checks to run.
    #[arg(long, value_enum, default_value_t = WhatChoice::All)]
    what: WhatChoice,

    #[command(flatten)]
    caps: CapArgs,
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let p = Prime::new(args.p)?;
    let caps = args.caps.resolve()?;
    let mut all_pass = true;

    if matches!(args.what, WhatChoice::Group | WhatChoice::All) {
        let dim = caps.checked_dim(p, args.n)? as u64;
        let points = dim * dim;
        if points * points > caps.max_triples {
            return Err(CliError::Core(Error::CapExceeded {
                what: "group-law pairs (p^{2N})^2",
                cap: caps.max_triples,
            }));
        }
        let grid: Vec<PhasePoint> = (0..points as usize)
            .map(|flat| PhasePoint::from_flat(p, args.n, flat))
            .collect();
        let mut composition_failures = 0u64;
        for x in &grid {
            for y in &grid {
                if !composition_law_holds(x, y) {
                    composition_failures += 1;
                }
            }
        }
        let adjoint_failures = grid.iter().filter(|x| !adjoint_law_holds(x)).count();
        let flip_failures = grid.iter().filter(|x| !flip_conjugation_holds(x)).count();
        let orthogonal = hw_orthogonality(p, args.n, &caps)?;
        println!(
            "check=composition_law p={} n={} pairs={} failures={} status={}",
            args.p,
            args.n,
            points * points,
            composition_failures,
            status(composition_failures == 0)
        );
        println!(
            "check=adjoint_law p={} n={} points={} failures={} status={}",
            args.p,
            args.n,
            points,
            adjoint_failures,
            status(adjoint_failures == 0)
        );
        println!(
            "check=flip_conjugation p={} n={} points={} failures={} status={}",
            args.p,
            args.n,
            points,
            flip_failures,
            status(flip_failures == 0)
        );
        println!(
            "check=hw_orthogonality p={} n={} status={}",
            args.p,
            args.n,
            status(orthogonal)
        );
        all_pass &=
            composition_failures == 0 && adjoint_failures == 0 && flip_failures == 0 && orthogonal;
    }

    if matches!(args.what, WhatChoice::Axioms | WhatChoice::All) {
        if args.n != 1 {
            return Err(CliError::Core(Error::SingleSiteOnly(args.n)));
        }
        let family = args.basis.to_family();
        let report = verify_wootters_axioms(p, family)?;
        println!(
            "check=unit_trace family={} p={} max_dev={:.3e} tol={LINE_TOL:.0e} status={}",
            family.tag(),
            args.p,
            report.trace_max_dev,
            status(report.trace_passes())
        );
        println!(
            "check=basis_orthogonality family={} p={} max_dev={:.3e} tol={LINE_TOL:.0e} status={}",
            family.tag(),
            args.p,
            report.orthogonality_max_dev,
            status(report.orthogonality_passes())
        );
        println!(
            "check=line_condition family={} p={} max_projector_dev={:.3e} max_resolution_dev={:.3e} status={}",
            family.tag(),
            args.p,
            report.line_condition.max_projector_dev,
            report.line_condition.max_resolution_dev,
            status(report.line_condition.passes())
        );
        all_pass &= report.passes();
    }

    println!("result={}", status(all_pass));
    Ok(if all_pass { 0 } else { 1 })
}

/// `gamma`: structure-constant counts, dumps, and closed-form checks.
#[derive(Args, Debug)]
#[command(group(
    ArgGroup::new("action").required(true).multiple(true).args(["nnz", "dump", "check_closed"])
))]
pub struct GammaArgs {
    /// Prime dimension of one site.
    #[arg(long)]
    p: u64,

    /// Number of sites.
    #[arg(long)]
    n: usize,

    /// Operator basis for the structure constants.
    #[arg(long, value_enum)]
    basis: GridBasisChoice,

    /// Print the antisymmetrized nonzero count.
    #[arg(long)]
    nnz: bool,

    /// Write the nonzero antisymmetrized tensor entries to a file.
    #[arg(long, value_name = "FILE")]
    dump: Option<PathBuf>,

    /// Compare every brute-force trace against the closed form.
    #[arg(long)]
    check_closed: bool,

    #[command(flatten)]
    caps: CapArgs,
}

fn format_gamma_dump(tensor: &GammaTensor) -> String {
    let mut records: Vec<((u32, u32, u32), num_complex::Complex64)> = tensor.iter().collect();
    records.sort_by_key(|(idx, _)| *idx);
    let mut out = String::new();
    out.push_str(&format!("p = {}\n", tensor.prime().get()));
    out.push_str(&format!("n = {}\n", tensor.n_sites()));
    out.push_str(&format!("basis = {}\n", tensor.basis().tag()));
    out.push_str(&format!("nnz = {}\n", tensor.nnz()));
    for ((a, b, g), v) in records {
        out.push_str(&format!("{a} {b} {g} {:.16e} {:.16e}\n", v.re, v.im));
    }
    out
}

pub fn cmd_gamma(args: &GammaArgs) -> Result<i32> {
    let p = Prime::new(args.p)?;
    let caps = args.caps.resolve()?;
    let basis = args.basis.to_basis();
    let mut code = 0;

    if args.nnz {
        let count = antisymmetrized_nnz(basis, p, args.n, &caps)?;
        println!("{count}");
    }

    if let Some(path) = &args.dump {
        let tensor = GammaTensor::build(basis, p, args.n, &caps)?;
        io::write_atomic(path, &format_gamma_dump(&tensor))?;
    }
    if args.check_closed {
        caps.checked_triples(p, args.n)?;
        let ops = BasisSet::build(p, args.n, basis, &caps)?;
        let points = ops.len();
        let grid: Vec<PhasePoint> = (0..points)
            .map(|flat| PhasePoint::from_flat(p, args.n, flat))
            .collect();
        let mut max_dev = 0.0f64;
        for (af, alpha) in grid.iter().enumerate() {
            for (bf, beta) in grid.iter().enumerate() {
                let product = ops.op(af).matmul(ops.op(bf));
                for (gf, gamma) in grid.iter().enumerate() {
                    let closed = match basis {
                        Basis::FourierWigner => gamma_fw_closed(alpha, beta, gamma),
                        Basis::Wigner => gamma_w_closed(alpha, beta, gamma)?,
                    };
                    let brute = product.trace_product(ops.op(gf));
                    max_dev = max_dev.max((brute - closed).norm());
                }
            }
        }
        let ok = max_dev <= GAMMA_TOL;
        println!(
            "check=closed_form basis={} p={} n={} triples={} max_dev={:.3e} tol={GAMMA_TOL:.0e} status={}",
            basis.tag(),
            args.p,
            args.n,
            points.pow(3),
            max_dev,
            status(ok)
        );
        if !ok {
            code = 1;
        }
    }
    Ok(code)
}

/// `evolve`: integrate a configured spin-chain run and write the
/// trajectory.
#[derive(Args, Debug)]
pub struct EvolveArgs {
    /// Run configuration file (TOML).
    #[arg(long, value_name = "FILE")]
    config: PathBuf,

    /// Trajectory output path (overrides `out` in the config).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Integration method (overrides `method` in the config).
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,

    #[command(flatten)]
    caps: CapArgs,
}

pub fn cmd_evolve(args: &EvolveArgs) -> Result<i32> {
    let caps = args.caps.resolve()?;
    let run = config::load_run_config(&args.config, &caps)?;
    let method = match args.method {
        Some(MethodChoice::Full) => Method::Full,
        Some(MethodChoice::Meanfield) => Method::MeanField,
        None => run.method.unwrap_or(Method::Full),
    };
    let out = args
        .out
        .clone()
        .or_else(|| run.out.clone())
        .ok_or_else(|| {
            CliError::Config("no output path: pass --out or set out in the config".into())
        })?;

    let traj = evolve(&run.initial, &run.spec, run.t_final, run.dt, method)?;
    io::write_atomic(&out, &io::format_trajectory(&traj))?;

    let task = run.task.as_deref().unwrap_or("-");
    println!(
        "task={task} method={} samples={} dt={:.16e} t_final={:.16e} seed={}",
        method.tag(),
        traj.times.len(),
        run.dt,
        run.t_final,
        run.seed
    );
    match method {
        Method::Full => println!(
            "trace_drift={:.3e} max_imag={:.3e}",
            traj.trace_coefficient_drift(),
            traj.max_imag()
        ),
        Method::MeanField => println!("trace_drift=n/a max_imag={:.3e}", traj.max_imag()),
    }
    Ok(0)
}

/// `transform`: convert between matrix and coefficient-grid files.
#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Input file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,

    /// Representation of the input file.
    #[arg(long, value_enum)]
    from: ReprChoice,

    /// Representation to write.
    #[arg(long, value_enum)]
    to: ReprChoice,

    /// Output file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,

    #[command(flatten)]
    caps: CapArgs,
}

/// Factors a matrix dimension as p^N for prime p.
fn prime_power_split(dim: usize) -> Result<(Prime, usize)> {
    if dim < 2 {
        return Err(CliError::Malformed(
            "matrix dimension must be at least 2 to determine p".into(),
        ));
    }
    let base = (2..=dim).find(|q| dim % q == 0).expect("dim >= 2");
    let mut rest = dim;
    let mut n = 0usize;
    while rest % base == 0 {
        rest /= base;
        n += 1;
    }
    if rest != 1 {
        return Err(CliError::Malformed(format!(
            "matrix dimension {dim} is not a prime power p^N"
        )));
    }
    Ok((Prime::new(base as u64)?, n))
}

fn grid_basis_of(choice: ReprChoice) -> Basis {
    match choice {
        ReprChoice::W => Basis::Wigner,
        ReprChoice::Fw => Basis::FourierWigner,
        ReprChoice::Matrix => unreachable!("matrix is not a grid basis"),
    }
}

pub fn cmd_transform(args: &TransformArgs) -> Result<i32> {
    let caps = args.caps.resolve()?;
    let text = io::read_file(&args.input)?;
    let output = match (args.from, args.to) {
        (ReprChoice::Matrix, ReprChoice::Matrix) => {
            let m = io::parse_matrix(&text)?;
            let (p, n) = prime_power_split(m.dim())?;
            caps.checked_dim(p, n)?;
            io::format_matrix(&m)
        }
        (ReprChoice::Matrix, to) => {
            let m = io::parse_matrix(&text)?;
            let (p, n) = prime_power_split(m.dim())?;
            caps.checked_dim(p, n)?;
            let basis = grid_basis_of(to);
            let grid = coeffs_from_matrix(p, n, &m, basis)?;
            io::format_grid(&grid, basis)
        }
        (from, to) => {
            let (grid, file_basis) = io::parse_grid(&text)?;
            let from_basis = grid_basis_of(from);
            if file_basis != from_basis {
                return Err(CliError::Malformed(format!(
                    "input file is tagged basis = {}, but --from says {}",
                    file_basis.tag(),
                    from_basis.tag()
                )));
            }
            caps.checked_dim(grid.prime(), grid.n_sites())?;
            match to {
                ReprChoice::Matrix => io::format_matrix(&matrix_from_coeffs(&grid, from_basis)),
                _ => {
                    let to_basis = grid_basis_of(to);
                    let converted = match (from_basis, to_basis) {
                        (Basis::FourierWigner, Basis::Wigner) => {
                            fourier_grid(&grid, Direction::Forward)
                        }
                        (Basis::Wigner, Basis::FourierWigner) => {
                            fourier_grid(&grid, Direction::Inverse)
                        }
                        _ => grid,
                    };
                    io::format_grid(&converted, to_basis)
                }
            }
        }
    };
    io::write_atomic(&args.out, &output)?;
    Ok(0)
}
