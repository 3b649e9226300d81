use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cbf_core::solver::{COLUMNS, EXTENDED_COLUMNS};
use tempfile::TempDir;

const MINIMAL: &str = r#"
[grid]
n = 16
[params]
mu = 0.1
beta = 1.0
r = 4.0
[solver]
dt = 0.01
t_end = 0.1
[ic]
family = "random"
seed = 3
band_limit = 4
"#;

fn cbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run_in(dir: &TempDir, sub: &str, config: &str, out: &str, extra: &[&str]) -> (Output, PathBuf) {
    let cfg = write_config(dir.path(), &format!("{out}.toml"), config);
    let out = dir.path().join(out);
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    (cbf(&args), out)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn orders(table: &Path) -> Vec<f64> {
    fs::read_to_string(table)
        .unwrap()
        .lines()
        .skip(1)
        .filter_map(|l| l.split('\t').nth(2)?.parse().ok())
        .collect()
}

#[test]
fn minimal_run_writes_outputs() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_in(&dir, "run", MINIMAL, "a", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["effective_config.toml", "diagnostics.tsv", "final.snap"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let diag = fs::read_to_string(out.join("diagnostics.tsv")).unwrap();
    assert_eq!(diag.lines().count(), 1 + 11);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("energy ="));
}

#[test]
fn effective_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_in(&dir, "run", MINIMAL, "a", &[]);
    assert!(o.status.success());
    let effective = fs::read_to_string(out.join("effective_config.toml")).unwrap();
    let (o2, out2) = run_in(&dir, "run", &effective, "b", &[]);
    assert!(o2.status.success(), "{}", stderr(&o2));
    assert_eq!(
        fs::read(out.join("diagnostics.tsv")).unwrap(),
        fs::read(out2.join("diagnostics.tsv")).unwrap()
    );
}

#[test]
fn zero_end_time_gives_one_sample() {
    let dir = TempDir::new().unwrap();
    let cfg = MINIMAL.replace("t_end = 0.1", "t_end = 0.0");
    let (o, out) = run_in(&dir, "run", &cfg, "a", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let diag = fs::read_to_string(out.join("diagnostics.tsv")).unwrap();
    assert_eq!(diag.lines().count(), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (a, out_a) = run_in(&dir, "run", MINIMAL, "a", &["--seed", "11"]);
    let (b, out_b) = run_in(&dir, "run", MINIMAL, "b", &["--seed", "11"]);
    assert!(a.status.success() && b.status.success());
    for f in ["diagnostics.tsv", "final.snap"] {
        assert_eq!(
            fs::read(out_a.join(f)).unwrap(),
            fs::read(out_b.join(f)).unwrap(),
            "{f}"
        );
    }
    let (c, out_c) = run_in(&dir, "run", MINIMAL, "c", &["--seed", "12"]);
    assert!(c.status.success());
    assert_ne!(
        fs::read(out_a.join("diagnostics.tsv")).unwrap(),
        fs::read(out_c.join("diagnostics.tsv")).unwrap()
    );
}

#[test]
fn diagnostics_header_matches_columns() {
    let dir = TempDir::new().unwrap();
    let (o, out) = run_in(&dir, "run", MINIMAL, "a", &["--extended-diagnostics"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let diag = fs::read_to_string(out.join("diagnostics.tsv")).unwrap();
    let header: Vec<&str> = diag.lines().next().unwrap().split('\t').collect();
    let expected: Vec<&str> = COLUMNS.iter().chain(EXTENDED_COLUMNS.iter()).copied().collect();
    assert_eq!(header, expected);
    for line in diag.lines().skip(1) {
        assert_eq!(line.split('\t').count(), expected.len());
    }
}

#[test]
fn invalid_parameter_exits_2_naming_the_key() {
    let dir = TempDir::new().unwrap();
    let cfg = MINIMAL.replace("mu = 0.1", "mu = -1.0");
    let (o, _) = run_in(&dir, "run", &cfg, "a", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("params.mu"), "{}", stderr(&o));
}

#[test]
fn unknown_key_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = MINIMAL.replace("[solver]", "[solver]\nsteps = 3");
    let (o, _) = run_in(&dir, "run", &cfg, "a", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("steps"), "{}", stderr(&o));
}

#[test]
fn missing_config_exits_2() {
    let o = cbf(&["run", "--config", "/nonexistent/cbf.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn blow_up_exits_3_with_partial_output() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
[grid]
n = 16
[params]
mu = 0.001
beta = 0.0
r = 3.0
[solver]
dt = 1.0
t_end = 50.0
blowup_factor = 10.0
[ic]
family = "random"
amplitude = 50.0
band_limit = 4
"#;
    let (o, out) = run_in(&dir, "run", cfg, "a", &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("blow-up"));
    assert!(out.join("diagnostics.tsv").exists());
    assert!(out.join("final.snap").exists());
}

#[test]
fn verify_single_check_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{MINIMAL}\n[verify]\nchecks = [\"trilinear\"]\nsamples = 20\n");
    let (o, out) = run_in(&dir, "verify", &cfg, "a", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = fs::read_to_string(out.join("verify_report.txt")).unwrap();
    assert!(report.contains("check: trilinear"));
    assert!(report.contains("status: PASS"));
}

#[test]
fn regime_error_fails_one_check_and_keeps_going() {
    let dir = TempDir::new().unwrap();
    let cfg = MINIMAL.replace("r = 4.0", "r = 2.5")
        + "\n[verify]\nchecks = [\"monotonicity_r_gt_3\", \"c_monotone\"]\nsamples = 10\n";
    let (o, out) = run_in(&dir, "verify", &cfg, "a", &[]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let report = fs::read_to_string(out.join("verify_report.txt")).unwrap();
    let blocks: Vec<&str> = report.split("\n\n").collect();
    assert_eq!(blocks.len(), 2);
    assert!(blocks[0].contains("status: FAIL") && blocks[0].contains("error: "));
    assert!(blocks[1].contains("check: c_monotone") && blocks[1].contains("status: PASS"));
}

#[test]
fn unknown_check_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{MINIMAL}\n[verify]\nchecks = [\"nope\"]\n");
    let (o, _) = run_in(&dir, "verify", &cfg, "a", &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_report_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = format!(
        "{MINIMAL}\n[verify]\nchecks = [\"c_monotone\", \"interpolation\"]\nsamples = 10\nn = 16\nband_limit = 4\n"
    );
    let (a, out_a) = run_in(&dir, "verify", &cfg, "a", &["--seed", "42"]);
    let (b, out_b) = run_in(&dir, "verify", &cfg, "b", &["--seed", "42"]);
    assert!(a.status.success() && b.status.success());
    let ra = fs::read(out_a.join("verify_report.txt")).unwrap();
    assert_eq!(ra, fs::read(out_b.join("verify_report.txt")).unwrap());
    // Sample i uses seed + i, so neighbouring seeds share samples.
    let (c, out_c) = run_in(&dir, "verify", &cfg, "c", &["--seed", "1000"]);
    assert!(c.status.success());
    assert_ne!(ra, fs::read(out_c.join("verify_report.txt")).unwrap());
}

#[test]
fn tolerance_override_rejudges_a_check() {
    let dir = TempDir::new().unwrap();
    // At r = 4 a coarse quadrature grid leaves the three forms apart by ~1e-5.
    let cfg = format!("{MINIMAL}\n[verify]\nchecks = [\"identity_3\"]\nsamples = 10\nn = 8\nband_limit = 3\n");
    let (o, _) = run_in(&dir, "verify", &cfg, "a", &[]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let relaxed = format!("{cfg}[verify.tolerances]\nidentity_3 = 1e-3\n");
    let (o, out) = run_in(&dir, "verify", &relaxed, "b", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(out.join("verify_report.txt"))
        .unwrap()
        .contains("tolerance overridden"));
}

#[test]
fn negative_tolerance_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{MINIMAL}\n[verify]\n[verify.tolerances]\nc_monotone = -1.0\n");
    let (o, _) = run_in(&dir, "verify", &cfg, "a", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("verify.tolerances"));
}

const TG: &str = r#"
[grid]
n = 32
[params]
mu = 0.1
beta = 0.0
r = 3.0
[solver]
t_end = 0.4
"#;

#[test]
fn taylor_green_dt_ladder_is_second_order() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{TG}\n[convergence]\ndt = [0.04, 0.02, 0.01]\nmetric = \"error\"\nmin_order = 1.9\n");
    let (o, out) = run_in(&dir, "convergence", &cfg, "a", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ords = orders(&out.join("convergence_dt.tsv"));
    assert_eq!(ords.len(), 2);
    for p in ords {
        assert!((1.9..=2.1).contains(&p), "order {p}");
    }
}

#[test]
fn single_mode_euler_ladder_is_first_order() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
[grid]
n = 16
[params]
mu = 0.5
beta = 0.0
r = 3.0
[solver]
scheme = "imex_euler"
t_end = 0.4
[ic]
family = "single_mode"
mode = [1, 2]
[convergence]
dt = [0.04, 0.02, 0.01, 0.005]
metric = "richardson"
"#;
    let (o, out) = run_in(&dir, "convergence", cfg, "a", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ords = orders(&out.join("convergence_dt.tsv"));
    assert_eq!(ords.len(), 2);
    for p in ords {
        assert!((0.9..=1.1).contains(&p), "order {p}");
    }
}

#[test]
fn energy_residual_ladder_and_min_order_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{TG}\n[convergence]\ndt = [0.04, 0.02, 0.01]\nmetric = \"energy_residual\"\nmin_order = 3.0\n");
    let (o, out) = run_in(&dir, "convergence", &cfg, "a", &[]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let ords = orders(&out.join("convergence_dt.tsv"));
    assert!(ords.iter().all(|p| (1.8..2.2).contains(p)), "{ords:?}");
}

#[test]
fn short_ladder_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{TG}\n[convergence]\ndt = [0.04, 0.02]\n");
    let (o, _) = run_in(&dir, "convergence", &cfg, "a", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 3"), "{}", stderr(&o));
}

#[test]
fn error_metric_rejects_non_taylor_green() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{MINIMAL}\n[convergence]\ndt = [0.02, 0.01, 0.005]\nmetric = \"error\"\n");
    let (o, _) = run_in(&dir, "convergence", &cfg, "a", &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn resolution_ladder_writes_table() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{MINIMAL}\n[convergence]\nn = [16, 24, 32]\nmetric = \"energy_residual\"\n");
    let (o, out) = run_in(&dir, "convergence", &cfg, "a", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(out.join("convergence_n.tsv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.starts_with("h\terror\torder"));
}

#[test]
fn canned_taylor_green_matches_exact() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("tg");
    let o = cbf(&["taylor-green", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let err: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("max_relative_error_vs_exact = "))
        .expect("error line")
        .parse()
        .unwrap();
    assert!(err < 1e-6, "{err}");
}
