use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn signlap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_signlap"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    let text = std::fs::read_to_string(dir.join("run_manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn check_reports_reference_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let out = signlap(dir.path(), &["check"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("c_-2 = 0.500000"), "{stdout}");
    let m = manifest(dir.path());
    assert_eq!(m["command"], "check");
    assert_eq!(m["status"], "ok");
    assert_eq!(m["config"]["geometry"]["rz"], 1.0);
    assert_eq!(m["outputs"][0], "check.json");
}

#[test]
fn swapped_phases_exit_with_ellipticity_code_and_remedy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("swapped.json");
    std::fs::write(
        &cfg,
        r#"{"geometry":{"rz":1,"ry":2},"coefficients":{"a_plus":{"constant":1},"a_minus":{"constant":2}},"transmission":"flux"}"#,
    )
    .unwrap();
    let out = signlap(dir.path(), &["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("remedy"));
}

#[test]
fn malformed_config_and_bad_arguments_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.json");
    std::fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(signlap(dir.path(), &["check", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(signlap(dir.path(), &["interface", "--mode", "9..3"]).status.code(), Some(1));
    assert_eq!(signlap(dir.path(), &["dtn", "--epsilon", "2"]).status.code(), Some(1));
}

#[test]
fn oracle_writes_spectrum_csv_with_both_signs() {
    let dir = tempfile::tempdir().unwrap();
    let out = signlap(dir.path(), &["oracle", "--lambda-max", "80", "--jobs", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("lambda,"));
    let lambdas: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(lambdas.iter().any(|&l| l > 0.0) && lambdas.iter().any(|&l| l < 0.0));
    assert!(lambdas.iter().all(|l| l.abs() <= 80.0));
}

#[test]
fn interface_modes_follow_the_symbol_under_both_conventions() {
    for (conv, coefficient) in [("unit_normal", 0.5), ("flux", 1.0)] {
        let dir = tempfile::tempdir().unwrap();
        let out = signlap(dir.path(), &["interface", "--mode", "30..32", "--convention", conv]);
        assert_eq!(out.status.code(), Some(0));
        let csv = std::fs::read_to_string(dir.path().join("interface_modes.csv")).unwrap();
        let rows: Vec<Vec<String>> = csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
        assert_eq!(rows.len(), 3);
        for r in rows {
            let n: f64 = r[0].parse().unwrap();
            let lambda: f64 = r[2].parse().unwrap();
            assert!((lambda / (coefficient * n * n) - 1.0).abs() < 0.05, "{conv}: {r:?}");
            assert_eq!(r[6], conv);
        }
    }
}

#[test]
fn dtn_and_fem_produce_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = signlap(dir.path(), &["dtn", "--epsilon", "-1", "--side", "minus"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("dtn_symbol.csv")).unwrap();
    assert!(csv.starts_with("epsilon,side,eta,c0,c1_empirical,remainder_slope"));

    let out = signlap(dir.path(), &["fem", "--edge", "0.1", "--count", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fem_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["nearest_zero_positive"].as_array().unwrap().len(), 4);
    assert_eq!(summary["nearest_zero_negative"].as_array().unwrap().len(), 4);
    let first = summary["nearest_zero_positive"][0].as_f64().unwrap();
    assert!(first > 0.0 && first < 20.0, "{first}");
    assert_eq!(manifest(dir.path())["command"], "fem");
}

#[test]
fn report_exits_with_acceptance_code_and_records_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = signlap(dir.path(), &["report"]);
    assert_eq!(out.status.code(), Some(4));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("criterion")).count(), 10);
    let m = manifest(dir.path());
    assert_eq!(m["status"], "acceptance_failed");
    assert_eq!(m["params"]["failed"], serde_json::json!([2]));
}
