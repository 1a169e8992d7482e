use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toda-darboux"))
        .args(args)
        .env_remove("TODA_DARBOUX_LOG")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn reports(v: &Value) -> Vec<&Value> {
    v["reports"].as_array().unwrap().iter().collect()
}

#[test]
fn factorize_emits_p_plus_one_gamma_rows() {
    let out = run(&["factorize", "--p", "2", "--n", "8", "--seed", "7"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["gamma_rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["gamma"]["columns"], 7);
    assert_eq!(v["factors"]["L"].as_array().unwrap().len(), 2);
    assert!(reports(&v).iter().all(|r| r["pass"] == true));
}

#[test]
fn p_one_needs_no_parameters() {
    let out = run(&["factorize", "--p", "1", "--n", "6"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["params"], serde_json::json!([]));
}

#[test]
fn invalid_sizes_are_usage_errors() {
    let out = run(&["factorize", "--n", "1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "usage");
    let out = run(&["verify", "--tol-verify", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&["factorize", "--p", "3", "--n", "9", "--seed", "11", "--mode", "complex", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn transform_zero_is_the_input() {
    let out = run(&["transform", "--i", "0", "--p", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    let identity = reports(&v).into_iter().find(|r| r["check"] == "identity").unwrap();
    assert!(identity["max_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn transform_one_is_hessenberg() {
    let out = run(&["transform", "--i", "1", "--p", "2", "--C-re", "-0.5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["J_i"]["p"], 2);
    let bands = v["J_i"]["bands"].as_object().unwrap();
    let mut keys: Vec<&String> = bands.keys().collect();
    keys.sort();
    assert_eq!(keys, vec!["-1", "-2", "0"]);
    assert!(reports(&v).iter().all(|r| r["pass"] == true));
}

#[test]
fn transform_index_out_of_range() {
    let out = run(&["transform", "--i", "5", "--p", "2"]);
    assert_ne!(out.status.code(), Some(0));
    assert_eq!(json(&out)["error"]["kind"], "invalid_argument");
}

#[test]
fn verify_default_passes() {
    let out = run(&["verify", "--p", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(reports(&v).len(), 4);
}

fn verify_residual(dt: &str, steps: &str) -> f64 {
    let out = run(&["verify", "--p", "2", "--dt", dt, "--steps", steps, "--tol-verify", "1"]);
    let v = json(&out);
    reports(&v)
        .iter()
        .filter(|r| r["check"].as_str().unwrap().starts_with("toda"))
        .map(|r| r["max_residual"].as_f64().unwrap())
        .fold(0.0, f64::max)
}

#[test]
fn halving_the_step_quarters_the_residual() {
    let ratio = verify_residual("1e-2", "10") / verify_residual("5e-3", "20");
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn corrupt_input_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"p": 2, "n": 4, "bands": {"0": [[1, 0]]"#).unwrap();
    let out = run(&["verify", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "parse");
}

#[test]
fn factorize_reads_matrix_and_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(&["factorize", "--p", "2", "--n", "6", "--seed", "3"]);
    let v = json(&first);
    let mpath = dir.path().join("j.json");
    let ppath = dir.path().join("params.json");
    std::fs::write(&mpath, v["J"].to_string()).unwrap();
    std::fs::write(&ppath, v["params"].to_string()).unwrap();
    let second = run(&["factorize", "--input", mpath.to_str().unwrap(), "--params", ppath.to_str().unwrap(), "--p", "2", "--n", "6"]);
    assert!(second.status.success());
    assert_eq!(json(&second)["gamma"], v["gamma"]);
}

#[test]
fn evolve_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["evolve", "--p", "2", "--n", "5", "--steps", "3", "--dt", "0.01", "--seed", "4", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(dir.path().join("toda.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,entry_id,re,im");
    // 5 + 4 + 3 band entries per sample, 4 samples.
    assert_eq!(lines.len(), 1 + 12 * 4);
    assert!(Path::new(&dir.path().join("kdv.csv")).exists());
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["steps"], 3);
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["C"], serde_json::json!([0.0, 0.0]));

    let missing = run(&["evolve", "--p", "2"]);
    assert_eq!(missing.status.code(), Some(2));
}
