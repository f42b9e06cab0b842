use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmt-outliers")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_gaussian() {
    let out = run(&["analyze", "--a", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "analyze");
    assert_eq!(v["result"]["regime"], "Supercritical");
    assert_eq!(v["result"]["a_star"].as_f64(), Some(2.5));
    assert_eq!(v["result"]["a_c"].as_f64(), Some(1.0));
}

#[test]
fn analyze_quartic_subcritical() {
    let out = run(&["analyze", "--potential", "[0,0,0,0,0.25]", "--a", "1", "--expect", "subcritical"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["regime"], "Subcritical");
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&["analyze", "--sweep", "a=0.5:2.5:5", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.starts_with("a,regime,"));
    assert_eq!(body.lines().count(), 6);
}

#[test]
fn oracle_reports_trace() {
    let out = run(&["oracle", "--n", "10", "--r", "1", "--a", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let trace = json(&out)["result"]["trace"].as_f64().unwrap();
    assert!((trace - 10.0).abs() < 1e-10, "trace {trace}");
}

#[test]
fn compare_against_oracle_passes() {
    let out = run(&["compare", "--a", "0.5", "--n", "16"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["pass"], true);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["frobnicate"][..],
        &["analyze", "--a", "2", "--expect", "subcritical"],
        &["oracle", "--n", "8", "--precision-bits", "128"],
        &["predict", "--a", "2", "--grid", "3:2:0"],
        &["mc", "--potential", "[0,0,0,0,0.25]", "--a", "2", "--n", "20", "--trials", "2"],
        &["analyze", "--potential", "not json"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn non_single_band_exits_two() {
    let out = run(&["analyze", "--potential", "[0,0,-2,0,0.25]", "--a", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_used_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"potential": [0, 0, 0.5], "a": 0.5}"#).unwrap();
    let out = run(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(json(&out)["result"]["b_star"].as_f64(), Some(2.5));
    let out = run(&["analyze", "--config", path.to_str().unwrap(), "--a", "3"]);
    assert_eq!(json(&out)["result"]["regime"], "Supercritical");

    std::fs::write(&path, r#"{"a": 0.5, "colour": "red"}"#).unwrap();
    assert_eq!(run(&["analyze", "--config", path.to_str().unwrap()]).status.code(), Some(1));
}
