//! End-to-end tests of the `sagnac` binary: golden files, determinism,
//! exit codes, and the documented output schemas.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sagnac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn singles_matches_golden_file() {
    let out = stdout_of(&["singles", "--xi", "30", "--trials", "10000"]);
    assert_eq!(out, golden("singles_default.csv"));
}

#[test]
fn chsh_analytic_matches_golden_file() {
    let out = stdout_of(&["chsh", "--analytic"]);
    assert_eq!(out, golden("chsh_analytic.json"));
}

#[test]
fn sweep_analytic_matches_golden_file() {
    let out = stdout_of(&["sweep", "--xi-steps", "3", "--theta-steps", "3", "--analytic"]);
    assert_eq!(out, golden("sweep_analytic.csv"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["singles", "--xi", "30", "--trials", "5000", "--seed", "7"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn singles_half_cut_within_errors() {
    let out = stdout_of(&["singles", "--xi", "30", "--trials", "100000", "--seed", "7"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "Ds");
    let mean: f64 = row[2].parse().unwrap();
    let stderr: f64 = row[3].parse().unwrap();
    assert!((mean - 0.5).abs() < 5.0 * stderr);
}

#[test]
fn singles_zero_bandwidth_is_exactly_half() {
    let out = stdout_of(&["singles", "--xi", "30", "--trials", "1000", "--bandwidth", "0"]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let mean: f64 = row[2].parse().unwrap();
    assert_eq!(mean, 0.5);
}

#[test]
fn sweep_grid_cells_follow_the_fringe() {
    let out = stdout_of(&["sweep", "--analytic"]);
    let mut cell_45_135 = None;
    let mut max_diag: f64 = 0.0;
    for line in out.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let (xi, theta): (f64, f64) = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        let rate: f64 = cols[2].parse().unwrap();
        if xi == 45.0 && theta == 135.0 {
            cell_45_135 = Some(rate);
        }
        if xi == theta {
            max_diag = max_diag.max(rate.abs());
        }
    }
    assert!((cell_45_135.unwrap() - 1.0).abs() < 1e-12);
    assert!(max_diag < 1e-12);
}

#[test]
fn chsh_report_schema_and_values() {
    let out = stdout_of(&["chsh", "--analytic"]);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in ["e_ab", "e_abp", "e_apb", "e_apbp", "s", "stderr", "mode"] {
        assert!(report.get(key).is_some(), "missing key {key}");
    }
    let s = report["s"].as_f64().unwrap();
    assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn chsh_degenerate_angles_stay_classical() {
    let out = stdout_of(&["chsh", "--analytic", "--angles", "0,0,0,0"]);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(report["s"].as_f64().unwrap() <= 2.0 + 1e-12);
}

#[test]
fn decohere_starts_at_the_analytic_rate() {
    let out = stdout_of(&[
        "decohere", "--bandwidth", "1.0", "--tau-max", "1e-9", "--steps", "2", "--trials", "2000",
    ]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let rate: f64 = row[1].parse().unwrap();
    // Default angles 22.5/67.5: sin^2(45 deg) = 1/2 in normalized units.
    assert!((rate - 0.5).abs() < 1e-12);
}

#[test]
fn json_format_emits_objects() {
    let out = stdout_of(&["singles", "--xi", "10", "--trials", "1000", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert_eq!(rows[0]["detector"], "Ds");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["chsh", "--angles", "1,2,3"]).status.code(), Some(2));
    assert_eq!(run(&["chsh", "--angles", "a,b,c,d"]).status.code(), Some(2));
    assert_eq!(run(&["decohere", "--bandwidth", "0", "--tau-max", "1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--xi-start", "90", "--xi-end", "0"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["singles", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let out = run(&[
        "singles", "--xi", "0", "--trials", "100", "--output", "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_sets_the_source() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, r#"{"amplitude_e0": 2.0, "spectrum": "uniform"}"#).unwrap();
    // Normalized rate is I0-independent; the run just has to accept the file.
    let out = stdout_of(&[
        "coincidence", "--xi", "0", "--theta", "90", "--analytic",
        "--config", path.to_str().unwrap(),
    ]);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let rate: f64 = row[3].parse().unwrap();
    assert!((rate - 1.0).abs() < 1e-12);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"amplitude_e0": -3}"#).unwrap();
    let out = run(&["singles", "--xi", "0", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("missing.json");
    let out = run(&["singles", "--xi", "0", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}
