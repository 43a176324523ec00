//! End-to-end checks of the `spectralstrip` binary: exit codes, report and
//! table files, determinism and config merging.

use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectralstrip")).args(args).env("SPECTRALSTRIP_THREADS", "1").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn verify_well_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["verify", "--well", "depth=1", "a=1", "dim=1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["all_pass"], true);
    let t = &r["results"]["theorem1"];
    assert!((t["lhs"].as_f64().unwrap() - 0.306).abs() < 1e-3);
    assert!((t["rhs"].as_f64().unwrap() - 0.375).abs() < 1e-3);
    assert!(t["deficit"].as_f64().unwrap() < 0.0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS theorem1"));
}

#[test]
fn sweep_writes_one_row_per_depth() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["sweep", "--well", "a=1", "dim=1", "--depths", "1,10,100", "--metric", "lt_ratio", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# spectralstrip sweep v1"));
    assert_eq!(lines.next(), Some("depth,lt_ratio,count,theorem1_pass"));
    let ratios: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 3);
    assert!(ratios.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn strip_random_ledger_holds() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["strip", "--random", "seed=7", "dim=2", "a=1", "strength=3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = &report(dir.path())["results"]["trace"];
    assert!(t["deficit"].as_f64().unwrap() <= t["total_error"].as_f64().unwrap() + 1e-6);
    assert!(dir.path().join("trace.csv").exists());
}

#[test]
fn braid_has_two_columns_and_plateaus() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["shoot", "--well", "1,1,1", "--plot", "braid", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("braid.csv")).unwrap();
    let rows: Vec<Vec<f64>> =
        csv.lines().skip(2).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 2));
    let root = 0.4537531658603282f64.sqrt();
    assert!((rows[0][1] - root).abs() < 1e-4);
    assert!((rows.last().unwrap()[1] + root).abs() < 1e-4);
}

#[test]
fn empty_spectrum_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["spectrum", "--well", "1e-6,0.05,1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv, "# spectralstrip spectrum v1\nindex,lambda,multiplet,marginal\n");
}

#[test]
fn reports_are_byte_identical() {
    let run = || {
        let o = bin(&["transform", "--random", "3,2,1,3"]);
        assert_eq!(code(&o), 0);
        o.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify"][..],
        &["frobnicate", "--well", "1,1,1"],
        &["verify", "--well", "1,1,1", "--random", "1,1,1,1"],
        &["verify", "--well", "depth=-1"],
        &["verify", "--well", "1,1,1", "--cluster-tol", "0"],
        &["verify", "--well", "1,1,1", "--plot", "trace"],
        &["verify", "--potential", "/nonexistent/v.json"],
        &["verify", "--config", "/nonexistent/c.json"],
    ] {
        assert_eq!(code(&bin(args)), 2, "{args:?}");
    }
    assert_eq!(code(&bin(&["--help"])), 0);
    assert_eq!(code(&bin(&["--version"])), 0);
}

#[test]
fn numerical_failure_exits_1_with_diagnostic() {
    // A potential too weak to bind anything resolvable leaves shooting
    // without a bracket.
    let o = bin(&["shoot", "--well", "1e-6,0.05,1"]);
    assert_eq!(code(&o), 1);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["all_pass"], false);
    assert!(!r["error"].as_str().unwrap().is_empty());
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"command": "verify", "potential": {"kind": "well", "depth": 1.0, "a": 1.0, "dim": 1}, "grid": {"x_min": -10.0, "x_max": 10.0, "n_points": 2001}}"#).unwrap();
    let out = dir.path().join("o");
    let o = bin(&["spectrum", "--config", cfg.to_str().unwrap(), "--well", "4,1,2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = report(&out);
    assert_eq!(r["command"], "spectrum");
    assert_eq!(r["inputs"]["potential"]["dim"], 2);
    assert_eq!(r["inputs"]["grid"]["n_points"], 2001);
    assert_eq!(r["results"]["spectrum"]["multiplets"][0]["multiplicity"], 2);
}

#[test]
fn potential_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.json");
    let grid = spectralstrip::Grid::uniform(-12.0, 12.0, 2401).unwrap();
    let v = spectralstrip::lattice::square_well(1.0, 1.0, 1, &grid).unwrap();
    spectralstrip::lattice::io::save_potential(&v, &path).unwrap();
    let o = bin(&["verify", "--potential", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&bin(&["verify", "--potential", path.to_str().unwrap(), "--grid", "-5,5,101"])), 2);
}
