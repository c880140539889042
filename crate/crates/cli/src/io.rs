//! Plain-text file formats: matrices, coefficient grids, trajectories.
//!
//! All floats are written with 17 significant digits so that repeated
//! runs produce byte-identical files, and every file is written
//! atomically (to a temporary sibling, then renamed into place).

use std::path::Path;

use num_complex::Complex64;
use qps_core::dynamics::{Trajectory, TrajectoryState};
use qps_core::{Basis, CoeffGrid, DenseOperator, ModVec, PhasePoint, Prime};

use crate::error::{CliError, Result};

/// Writes `contents` to `path` via a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Config(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    std::fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

/// Reads a whole file, mapping I/O errors to the CLI error type.
pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn fmt_complex(v: Complex64) -> String {
    format!("{:.16e} {:.16e}", v.re, v.im)
}

fn parse_complex_line(line: &str, lineno: usize) -> Result<Complex64> {
    let mut parts = line.split_whitespace();
    let bad = || CliError::Malformed(format!("line {lineno}: expected two floats, got {line:?}"));
    let re = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let im = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Splits leading `key = value` header lines from the value lines.
fn split_header(text: &str) -> (Vec<(&str, &str)>, Vec<(usize, &str)>) {
    let mut header = Vec::new();
    let mut body = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if body.is_empty() {
            if let Some((key, value)) = line.split_once('=') {
                header.push((key.trim(), value.trim()));
                continue;
            }
        }
        body.push((idx + 1, line));
    }
    (header, body)
}

fn header_value<'a>(header: &[(&str, &'a str)], key: &str) -> Result<&'a str> {
    header
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| CliError::Malformed(format!("missing header field {key:?}")))
}

/// Renders a matrix as a `dim = D` header and dim^2 row-major entries.
pub fn format_matrix(m: &DenseOperator) -> String {
    let mut out = String::new();
    out.push_str(&format!("dim = {}\n", m.dim()));
    for v in m.entries() {
        out.push_str(&fmt_complex(*v));
        out.push('\n');
    }
    out
}

/// Parses the matrix format written by `format_matrix`.
pub fn parse_matrix(text: &str) -> Result<DenseOperator> {
    let (header, body) = split_header(text);
    let dim: usize = header_value(&header, "dim")?
        .parse()
        .map_err(|_| CliError::Malformed("dim is not an integer".into()))?;
    if dim == 0 {
        return Err(CliError::Malformed("dim must be positive".into()));
    }
    if body.len() != dim * dim {
        return Err(CliError::Malformed(format!(
            "expected {} entries for dim = {dim}, got {}",
            dim * dim,
            body.len()
        )));
    }
    let entries = body
        .iter()
        .map(|(lineno, line)| parse_complex_line(line, *lineno))
        .collect::<Result<Vec<_>>>()?;
    Ok(DenseOperator::from_entries(dim, entries))
}

/// Renders a coefficient grid with its `p`, `n`, and `basis` header.
pub fn format_grid(grid: &CoeffGrid, basis: Basis) -> String {
    let mut out = String::new();
    out.push_str(&format!("p = {}\n", grid.prime().get()));
    out.push_str(&format!("n = {}\n", grid.n_sites()));
    out.push_str(&format!("basis = {}\n", basis.tag()));
    for v in grid.values() {
        out.push_str(&fmt_complex(*v));
        out.push('\n');
    }
    out
}

/// Parses the grid format written by `format_grid`.
pub fn parse_grid(text: &str) -> Result<(CoeffGrid, Basis)> {
    let (header, body) = split_header(text);
    let p: u64 = header_value(&header, "p")?
        .parse()
        .map_err(|_| CliError::Malformed("p is not an integer".into()))?;
    let n: usize = header_value(&header, "n")?
        .parse()
        .map_err(|_| CliError::Malformed("n is not an integer".into()))?;
    let basis = match header_value(&header, "basis")? {
        "w" => Basis::Wigner,
        "fw" => Basis::FourierWigner,
        other => {
            return Err(CliError::Malformed(format!(
                "basis must be w or fw, got {other:?}"
            )))
        }
    };
    let p = Prime::new(p)?;
    let values = body
        .iter()
        .map(|(lineno, line)| parse_complex_line(line, *lineno))
        .collect::<Result<Vec<_>>>()?;
    let grid = CoeffGrid::from_values(p, n, values)?;
    Ok((grid, basis))
}

/// Flat grid indices of the per-site tracked modes, in emission order
/// x_k = (e_k, 0), y_k = (e_k, e_k), z_k = (0, e_k) for each site k.
fn meanfield_flats(p: Prime, n_sites: usize) -> Vec<usize> {
    let mut flats = Vec::with_capacity(3 * n_sites);
    for k in 0..n_sites {
        let e = ModVec::basis_vector(p, n_sites, k);
        let zero = ModVec::zeros(p, n_sites);
        flats.push(PhasePoint::new(e.clone(), zero.clone()).flat_index());
        flats.push(PhasePoint::new(e.clone(), e.clone()).flat_index());
        flats.push(PhasePoint::new(zero, e).flat_index());
    }
    flats
}

/// Renders a trajectory as delimited text: a time column, then one
/// `re[k]`/`im[k]` column pair per tracked flat grid index.
pub fn format_trajectory(traj: &Trajectory) -> String {
    let labels: Vec<usize> = match &traj.states[0] {
        TrajectoryState::Full(grid) => (0..grid.len()).collect(),
        TrajectoryState::MeanField(triples) => {
            meanfield_flats(Prime::new(2).expect("2 is prime"), triples.len())
        }
    };
    let mut out = String::from("t");
    for flat in &labels {
        out.push_str(&format!(",re[{flat}],im[{flat}]"));
    }
    out.push('\n');
    for (t, state) in traj.times.iter().zip(&traj.states) {
        out.push_str(&format!("{t:.16e}"));
        let values: Vec<Complex64> = match state {
            TrajectoryState::Full(grid) => grid.values().to_vec(),
            TrajectoryState::MeanField(triples) => {
                triples.iter().flat_map(|tr| [tr.x, tr.y, tr.z]).collect()
            }
        };
        for v in values {
            out.push_str(&format!(",{:.16e},{:.16e}", v.re, v.im));
        }
        out.push('\n');
    }
    out
}
