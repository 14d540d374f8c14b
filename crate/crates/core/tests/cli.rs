use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn subexp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subexp")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn run_writes_artefacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = write_config(
        dir.path(),
        r#"{"experiment": "slln", "model": {"preset": "E1"}, "seeds": [4, 5]}"#,
    );
    let o = subexp(&["run", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let resolved = read_json(&out.join("resolved_config.json"));
    assert_eq!(resolved["epsilon"], 0.1);
    assert_eq!(resolved["seeds"], serde_json::json!([4, 5]));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.starts_with("run_id,experiment,strategy,seed,n,statistic,value,tolerance,verdict\n"));
    let results = read_json(&out.join("results.json"));
    assert_eq!(results["passed"], true);
    assert_eq!(results["result"]["rows"].as_array().unwrap().len(), csv.lines().count() - 1);
    assert!(!out.join("failure.json").exists());
}

#[test]
fn seed_override_replaces_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = write_config(dir.path(), r#"{"experiment": "slln", "model": {"preset": "E1"}}"#);
    let o = subexp(&["run", &config, "--seed-override", "17", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(&out.join("resolved_config.json"))["seeds"], serde_json::json!([17]));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    let seeds: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert!(seeds.iter().all(|s| *s == "17" || s.is_empty()));
}

#[test]
fn check_axioms_reports_every_trial() {
    let dir = tempfile::tempdir().unwrap();
    let o = subexp(&["check-axioms", "--trials", "1000", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1001);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",pass")));
}

#[test]
fn inequality_grid_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"experiment": "slln", "model": {"preset": "E1"}}"#);
    let out = dir.path().join("grid");
    let o = subexp(&["inequality-grid", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.lines().any(|l| l.contains(",exact_lhs,")));
    assert!(!csv.contains(",fail"));
    let resolved = read_json(&out.join("resolved_config.json"));
    assert_eq!(resolved["experiment"], "inequality_grid");
    assert_eq!(resolved["quantum"], 1.0);
}

#[test]
fn exact_weak_law_in_the_plane_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"experiment": "weak_lln", "model": {"members": [
            {"atoms": [{"value": [1, 0, 0], "weight": 1}]},
            {"atoms": [{"value": [0, 0, 1], "weight": 1}]}]}}"#,
    );
    let out = dir.path().join("out");
    let o = subexp(&["run", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let failure = read_json(&out.join("failure.json"));
    assert_eq!(failure["exit_code"], 2);
    assert!(failure["message"].as_str().unwrap().contains("exact mode requires d=1"));
}

#[test]
fn failing_verdicts_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"experiment": "slln", "model": {"preset": "E1"}, "n": 20000, "tolerances": {"mean": 0.0}}"#,
    );
    let out = dir.path().join("out");
    let o = subexp(&["run", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let failure = read_json(&out.join("failure.json"));
    assert_eq!(failure["kind"], "VerdictFailure");
    assert!(!failure["failed_rows"].as_array().unwrap().is_empty());
    assert!(out.join("results.csv").exists());
}

#[test]
fn schema_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"experiment": "slln", "modle": {"preset": "E1"}}"#);
    let out = dir.path().join("out");
    let o = subexp(&["run", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("modle"));
    let failure = read_json(&out.join("failure.json"));
    assert_eq!(failure["kind"], "SchemaError");
}

#[test]
fn bad_weights_are_value_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"experiment": "slln", "model": {"members": [
            {"atoms": [{"value": 1, "weight": 0.49}, {"value": -1, "weight": 0.5}]}]}}"#,
    );
    let out = dir.path().join("out");
    let o = subexp(&["run", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let failure = read_json(&out.join("failure.json"));
    assert_eq!(failure["kind"], "ValueError");
    assert_eq!(failure["path"], "model.members[0].atoms");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"experiment": "cluster_set", "model": {"preset": "V2-mix"}, "n": 50000, "seeds": [1, 2]}"#,
    );
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4", "1"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let o = subexp(&["run", &config, "--out", out.to_str().unwrap(), "--threads", threads]);
        assert!(o.status.code().unwrap() <= 1);
        outputs.push(fs::read(out.join("results.csv")).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}
