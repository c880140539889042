//! Run configuration for `evolve`: TOML schema and resolution into
//! library types.
//!
//! Paths inside a config file are resolved relative to the directory
//! containing the file, so a config and its input states can travel
//! together.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use qps_core::dynamics::{DensityState, Method, SpinHamiltonianSpec};
use qps_core::{Caps, Prime};

use crate::error::{CliError, Result};
use crate::io;

/// Fixed default seed, recorded in the diagnostics of every run.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub p: u64,
    pub n: usize,
    #[serde(default)]
    pub task: Option<String>,
    pub t_final: f64,
    pub dt: f64,
    #[serde(default)]
    pub method: Option<MethodTag>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub hamiltonian: HamiltonianSection,
    pub initial: InitialSection,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodTag {
    Full,
    Meanfield,
}

impl MethodTag {
    pub fn to_method(self) -> Method {
        match self {
            MethodTag::Full => Method::Full,
            MethodTag::Meanfield => Method::MeanField,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSection {
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub jperp: Coupling,
    #[serde(default)]
    pub jz: Coupling,
}

/// A coupling is either one uniform off-diagonal value or a full
/// N x N matrix given as rows.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Coupling {
    Uniform(f64),
    Matrix(Vec<Vec<f64>>),
}

impl Default for Coupling {
    fn default() -> Self {
        Coupling::Uniform(0.0)
    }
}

impl Coupling {
    /// Expands to a row-major N x N matrix with a zero diagonal.
    fn expand(&self, n: usize, field: &str) -> Result<Vec<f64>> {
        match self {
            Coupling::Uniform(s) => {
                let mut flat = vec![*s; n * n];
                for k in 0..n {
                    flat[k * n + k] = 0.0;
                }
                Ok(flat)
            }
            Coupling::Matrix(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::Config(format!(
                        "hamiltonian.{field}: expected an {n} x {n} matrix"
                    )));
                }
                Ok(rows.iter().flatten().copied().collect())
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default)]
    pub bloch: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub matrix: Option<PathBuf>,
    #[serde(default)]
    pub grid: Option<PathBuf>,
}

/// A config resolved into library types, ready to run.
pub struct ResolvedRun {
    pub task: Option<String>,
    pub spec: SpinHamiltonianSpec,
    pub initial: DensityState,
    pub t_final: f64,
    pub dt: f64,
    pub method: Option<Method>,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

fn join_config_dir(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

/// Reads and resolves a run configuration file. The dimension cap is
/// enforced before any state of size p^N is materialized.
pub fn load_run_config(path: &Path, caps: &Caps) -> Result<ResolvedRun> {
    let raw = io::read_file(path)?;
    let cfg: RunConfig = toml::from_str(&raw).map_err(|e| CliError::Config(e.to_string()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let p = Prime::new(cfg.p)?;
    caps.checked_dim(p, cfg.n)?;
    let spec = SpinHamiltonianSpec::new(
        cfg.n,
        cfg.hamiltonian.jperp.expand(cfg.n, "jperp")?,
        cfg.hamiltonian.jz.expand(cfg.n, "jz")?,
        cfg.hamiltonian.omega,
    )?;

    let given = [
        cfg.initial.bloch.is_some(),
        cfg.initial.matrix.is_some(),
        cfg.initial.grid.is_some(),
    ]
    .iter()
    .filter(|&&g| g)
    .count();
    if given != 1 {
        return Err(CliError::Config(
            "initial: set exactly one of bloch, matrix, grid".into(),
        ));
    }
    let initial = if let Some(sites) = &cfg.initial.bloch {
        if sites.len() != cfg.n {
            return Err(CliError::Config(format!(
                "initial.bloch: expected {} site vectors, got {}",
                cfg.n,
                sites.len()
            )));
        }
        if cfg.p != 2 {
            return Err(CliError::Config("initial.bloch: requires p = 2".into()));
        }
        DensityState::from_bloch(sites)?
    } else if let Some(rel) = &cfg.initial.matrix {
        let m = io::parse_matrix(&io::read_file(&join_config_dir(base, rel))?)?;
        DensityState::from_matrix(p, cfg.n, m)?
    } else {
        let rel = cfg.initial.grid.as_ref().expect("one descriptor is set");
        let (grid, basis) = io::parse_grid(&io::read_file(&join_config_dir(base, rel))?)?;
        if grid.prime() != p || grid.n_sites() != cfg.n {
            return Err(CliError::Config(format!(
                "initial.grid: file is for p = {}, n = {}, config says p = {}, n = {}",
                grid.prime().get(),
                grid.n_sites(),
                cfg.p,
                cfg.n
            )));
        }
        DensityState::from_coeffs(&grid, basis)?
    };

    Ok(ResolvedRun {
        task: cfg.task,
        spec,
        initial,
        t_final: cfg.t_final,
        dt: cfg.dt,
        method: cfg.method.map(MethodTag::to_method),
        out: cfg.out.map(|rel| join_config_dir(base, &rel)),
        seed: cfg.seed,
    })
}
