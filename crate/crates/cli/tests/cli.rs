//! End-to-end tests driving the `qps` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qps"))
        .args(args)
        .env_remove("QPS_CAP")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        stdout_of(out),
        stderr_of(out)
    );
}

/// Parses the delimited trajectory format: header labels and rows.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|line| {
            line.split(',')
                .map(|v| v.parse::<f64>().expect("float cell"))
                .collect::<Vec<f64>>()
        })
        .collect::<Vec<_>>();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], label: &str) -> Vec<f64> {
    let idx = header
        .iter()
        .position(|h| h == label)
        .unwrap_or_else(|| panic!("column {label} in {header:?}"));
    rows.iter().map(|r| r[idx]).collect()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("write test file");
    path
}

#[test]
fn verify_axioms_pass_for_both_families() {
    for (p, family) in [("3", "wigner"), ("5", "wootters"), ("2", "wootters")] {
        let out = qps(&["verify", "--p", p, "--basis", family, "--what", "axioms"]);
        assert_exit(&out, 0);
        let text = stdout_of(&out);
        assert!(text.contains("check=line_condition"), "{text}");
        assert!(text.contains("result=pass"), "{text}");
        assert!(!text.contains("status=fail"), "{text}");
    }
}

#[test]
fn verify_group_law_report() {
    let out = qps(&["verify", "--p", "2", "--what", "group"]);
    assert_exit(&out, 0);
    let text = stdout_of(&out);
    assert!(text.contains("check=composition_law"), "{text}");
    assert!(text.contains("check=hw_orthogonality"), "{text}");
    assert!(text.contains("result=pass"), "{text}");
}

#[test]
fn verify_group_law_multi_site() {
    let out = qps(&["verify", "--p", "3", "--n", "2", "--what", "group"]);
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("pairs=6561"));
}

#[test]
fn verify_rejects_non_prime_p() {
    let out = qps(&["verify", "--p", "4", "--basis", "wigner"]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("not prime"));
}

#[test]
fn verify_axioms_require_single_site() {
    let out = qps(&["verify", "--p", "3", "--n", "2", "--what", "axioms"]);
    assert_exit(&out, 2);
}

#[test]
fn gamma_nnz_reproduces_counts() {
    let cases = [
        ("2", "1", "w", "24"),
        ("2", "1", "fw", "6"),
        ("3", "1", "w", "432"),
        ("2", "2", "fw", "120"),
    ];
    for (p, n, basis, expected) in cases {
        let out = qps(&["gamma", "--p", p, "--n", n, "--basis", basis, "--nnz"]);
        assert_exit(&out, 0);
        assert_eq!(
            stdout_of(&out).trim(),
            expected,
            "p={p} n={n} basis={basis}"
        );
    }
}

#[test]
fn gamma_check_closed_passes() {
    for basis in ["w", "fw"] {
        let out = qps(&[
            "gamma",
            "--p",
            "3",
            "--n",
            "1",
            "--basis",
            basis,
            "--check-closed",
        ]);
        assert_exit(&out, 0);
        assert!(stdout_of(&out).contains("status=pass"));
    }
}

#[test]
fn gamma_cap_exceeded_exits_3() {
    let out = qps(&[
        "gamma",
        "--p",
        "3",
        "--n",
        "1",
        "--basis",
        "w",
        "--nnz",
        "--max-triples",
        "10",
    ]);
    assert_exit(&out, 3);
    assert!(stderr_of(&out).contains("cap"));
}

#[test]
fn gamma_cap_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_qps"))
        .args(["gamma", "--p", "3", "--n", "1", "--basis", "w", "--nnz"])
        .env("QPS_CAP", "243,10")
        .output()
        .expect("binary runs");
    assert_exit(&out, 3);
}

#[test]
fn gamma_requires_an_action_flag() {
    let out = qps(&["gamma", "--p", "2", "--n", "1", "--basis", "fw"]);
    assert_exit(&out, 2);
}

#[test]
fn gamma_dump_is_deterministic_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gamma.txt");
    let args = [
        "gamma",
        "--p",
        "2",
        "--n",
        "1",
        "--basis",
        "fw",
        "--dump",
        path.to_str().unwrap(),
    ];
    assert_exit(&qps(&args), 0);
    let first = std::fs::read_to_string(&path).unwrap();
    assert_exit(&qps(&args), 0);
    let second = std::fs::read_to_string(&path).unwrap();
    assert_eq!(first, second);

    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("p = 2"));
    assert_eq!(lines.next(), Some("n = 1"));
    assert_eq!(lines.next(), Some("basis = fw"));
    let nnz: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("nnz = "))
        .and_then(|v| v.parse().ok())
        .expect("nnz header");
    let records: Vec<&str> = lines.collect();
    assert_eq!(records.len(), nnz);
    for record in records {
        assert_eq!(record.split_whitespace().count(), 5, "{record}");
    }
}

const RABI_CONFIG: &str = r#"
task = "rabi"
p = 2
n = 1
t_final = 1.0
dt = 0.001

[hamiltonian]
omega = 1.0

[initial]
bloch = [[0.0, 0.0, 1.0]]
"#;

#[test]
fn evolve_rabi_matches_the_analytic_solution() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "rabi.toml", RABI_CONFIG);
    let traj = dir.path().join("rabi.csv");
    let out = qps(&[
        "evolve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        traj.to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let text = stdout_of(&out);
    assert!(text.contains("task=rabi"), "{text}");
    assert!(text.contains("trace_drift=0.000e0"), "{text}");

    let (header, rows) = parse_csv(&std::fs::read_to_string(&traj).unwrap());
    let times = column(&header, &rows, "t");
    let z = column(&header, &rows, "re[1]");
    let y = column(&header, &rows, "re[3]");
    let x = column(&header, &rows, "re[2]");
    let mut worst = 0.0f64;
    for (k, t) in times.iter().enumerate() {
        worst = worst.max((z[k] - (2.0 * t).cos()).abs());
        worst = worst.max((y[k] + (2.0 * t).sin()).abs());
        worst = worst.max(x[k].abs());
    }
    assert!(worst <= 1e-6, "worst deviation {worst:.3e}");
}

#[test]
fn evolve_zero_hamiltonian_freezes_the_state() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "frozen.toml",
        r#"
p = 2
n = 1
t_final = 0.5
dt = 0.01

[hamiltonian]

[initial]
bloch = [[0.6, 0.0, 0.8]]
"#,
    );
    let traj = dir.path().join("frozen.csv");
    let out = qps(&[
        "evolve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        traj.to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    let (_, rows) = parse_csv(&std::fs::read_to_string(&traj).unwrap());
    for row in &rows {
        assert_eq!(row[1..], rows[0][1..], "columns drift under H = 0");
    }
}

const TWO_SPIN_CONFIG: &str = r#"
task = "two-spin"
p = 2
n = 2
t_final = 1.0
dt = 0.01
out = "full.csv"

[hamiltonian]
omega = 0.3
jperp = 0.2
jz = 0.1

[initial]
bloch = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
"#;

#[test]
fn evolve_full_and_meanfield_both_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "pair.toml", TWO_SPIN_CONFIG);
    let full_path = dir.path().join("full.csv");
    let mean_path = dir.path().join("mean.csv");

    // The config's own `out` is used for the full run; the flag
    // overrides it for the mean-field run.
    let out = qps(&["evolve", "--config", config.to_str().unwrap()]);
    assert_exit(&out, 0);
    let out = qps(&[
        "evolve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        mean_path.to_str().unwrap(),
        "--method",
        "meanfield",
    ]);
    assert_exit(&out, 0);
    assert!(stdout_of(&out).contains("method=meanfield"));

    let (full_header, full_rows) = parse_csv(&std::fs::read_to_string(&full_path).unwrap());
    let (mean_header, mean_rows) = parse_csv(&std::fs::read_to_string(&mean_path).unwrap());
    assert_eq!(full_header.len(), 1 + 2 * 16);
    assert_eq!(mean_header.len(), 1 + 2 * 6);
    assert_eq!(full_rows.len(), mean_rows.len());

    // Reported for inspection, deliberately not judged: the methods
    // agree at t = 0 and drift apart under the coupling.
    let mut divergence = 0.0f64;
    for label in &mean_header[1..] {
        let f = column(&full_header, &full_rows, label);
        let m = column(&mean_header, &mean_rows, label);
        for (a, b) in f.iter().zip(&m) {
            divergence = divergence.max((a - b).abs());
        }
        assert!(
            (f[0] - m[0]).abs() <= 1e-12,
            "initial mismatch in {label}: {} vs {}",
            f[0],
            m[0]
        );
    }
    assert!(divergence.is_finite());
    println!("full vs meanfield divergence over tracked modes: {divergence:.3e}");
}

#[test]
fn evolve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "rabi.toml", RABI_CONFIG);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = qps(&[
            "evolve",
            "--config",
            config.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_exit(&out, 0);
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "repeated runs must be byte-identical"
    );
}

#[test]
fn evolve_rejects_schema_violations() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "bad.toml",
        "p = 2\nn = 1\nt_final = 1.0\ndt = 0.1\nbogus = 1\n[hamiltonian]\n[initial]\nbloch = [[0.0, 0.0, 1.0]]\n",
    );
    let out = qps(&[
        "evolve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("t.csv").to_str().unwrap(),
    ]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("bogus"));
}

#[test]
fn evolve_without_an_output_path_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(dir.path(), "rabi.toml", RABI_CONFIG);
    let out = qps(&["evolve", "--config", config.to_str().unwrap()]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("output path"));
}

#[test]
fn evolve_numerical_blowup_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "blowup.toml",
        r#"
p = 2
n = 1
t_final = 1e160
dt = 1e160

[hamiltonian]
omega = 1e155

[initial]
bloch = [[0.0, 0.0, 1.0]]
"#,
    );
    let out = qps(&[
        "evolve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("t.csv").to_str().unwrap(),
    ]);
    assert_exit(&out, 4);
}

const HALF_I_PLUS_Z: &str = "dim = 2\n\
    1.0000000000000000e0 0.0000000000000000e0\n\
    0.0000000000000000e0 0.0000000000000000e0\n\
    0.0000000000000000e0 0.0000000000000000e0\n\
    0.0000000000000000e0 0.0000000000000000e0\n";

fn transform(dir: &Path, input: &Path, from: &str, to: &str, name: &str) -> PathBuf {
    let out_path = dir.join(name);
    let out = qps(&[
        "transform",
        "--in",
        input.to_str().unwrap(),
        "--from",
        from,
        "--to",
        to,
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_exit(&out, 0);
    out_path
}

fn grid_values(path: &Path) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.contains('='))
        .map(|l| {
            let mut parts = l.split_whitespace();
            (
                parts.next().unwrap().parse().unwrap(),
                parts.next().unwrap().parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn transform_half_i_plus_z_has_the_expected_fw_grid() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "state.mat", HALF_I_PLUS_Z);
    let grid_path = transform(dir.path(), &input, "matrix", "fw", "state.fw");
    let values = grid_values(&grid_path);
    let expected = [(1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)];
    assert_eq!(values.len(), 4);
    for (k, ((re, im), (ere, eim))) in values.iter().zip(expected).enumerate() {
        assert!(
            (re - ere).abs() <= 1e-12 && (im - eim).abs() <= 1e-12,
            "flat {k}: ({re}, {im})"
        );
    }
}

#[test]
fn transform_round_trips_through_every_representation() {
    let dir = tempfile::tempdir().unwrap();
    // A Hermitian, positive, trace-one matrix with nontrivial phases.
    let input = write_file(
        dir.path(),
        "rho.mat",
        "dim = 2\n\
         7.0000000000000000e-1 0.0000000000000000e0\n\
         1.0000000000000000e-1 2.0000000000000000e-1\n\
         1.0000000000000000e-1 -2.0000000000000000e-1\n\
         3.0000000000000000e-1 0.0000000000000000e0\n",
    );
    let fw = transform(dir.path(), &input, "matrix", "fw", "rho.fw");
    let w = transform(dir.path(), &fw, "fw", "w", "rho.w");
    let fw_again = transform(dir.path(), &w, "w", "fw", "rho.fw2");
    let back = transform(dir.path(), &fw_again, "fw", "matrix", "rho2.mat");

    let original = grid_values(&input);
    let returned = grid_values(&back);
    for (k, ((are, aim), (bre, bim))) in original.iter().zip(&returned).enumerate() {
        assert!(
            (are - bre).abs() <= 1e-12 && (aim - bim).abs() <= 1e-12,
            "entry {k}: ({are}, {aim}) vs ({bre}, {bim})"
        );
    }
}

#[test]
fn transform_maximally_mixed_is_a_delta_grid() {
    let dir = tempfile::tempdir().unwrap();
    let mut matrix = String::from("dim = 4\n");
    for row in 0..4 {
        for col in 0..4 {
            let v = if row == col { 0.25 } else { 0.0 };
            matrix.push_str(&format!("{v:.16e} 0.0000000000000000e0\n"));
        }
    }
    let input = write_file(dir.path(), "mixed.mat", &matrix);
    let grid_path = transform(dir.path(), &input, "matrix", "fw", "mixed.fw");
    let values = grid_values(&grid_path);
    assert_eq!(values.len(), 16);
    for (k, (re, im)) in values.iter().enumerate() {
        let expected = if k == 0 { 1.0 } else { 0.0 };
        assert!(
            (re - expected).abs() <= 1e-12 && im.abs() <= 1e-12,
            "flat {k}: ({re}, {im})"
        );
    }
}

#[test]
fn transform_rejects_a_mismatched_basis_tag() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "state.mat", HALF_I_PLUS_Z);
    let fw = transform(dir.path(), &input, "matrix", "fw", "state.fw");
    let out = qps(&[
        "transform",
        "--in",
        fw.to_str().unwrap(),
        "--from",
        "w",
        "--to",
        "matrix",
        "--out",
        dir.path().join("x.mat").to_str().unwrap(),
    ]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("tagged"));
}

#[test]
fn transform_rejects_non_prime_power_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let mut matrix = String::from("dim = 6\n");
    for _ in 0..36 {
        matrix.push_str("0.0000000000000000e0 0.0000000000000000e0\n");
    }
    let input = write_file(dir.path(), "bad.mat", &matrix);
    let out = qps(&[
        "transform",
        "--in",
        input.to_str().unwrap(),
        "--from",
        "matrix",
        "--to",
        "fw",
        "--out",
        dir.path().join("x.fw").to_str().unwrap(),
    ]);
    assert_exit(&out, 2);
    assert!(stderr_of(&out).contains("prime power"));
}
