use std::process::{Command, Output};

use serde_json::Value;

fn qcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcp")).args(args).env_remove("QCP_DIM_CAP").output().expect("spawn qcp")
}

fn json(args: &[&str]) -> Value {
    let out = qcp(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn value(v: &Value) -> f64 {
    v["outputs"]["value"].as_f64().or_else(|| v["outputs"]["report"]["value"].as_f64()).unwrap()
}

#[test]
fn avg_error_examples() {
    let v = json(&["avg-error", "--M", "0", "--N1", "3", "--N2", "5", "--d", "2"]);
    assert_eq!(value(&v), 0.5);
    let v = json(&["avg-error", "--M", "1", "--N1", "1", "--N2", "1", "--d", "2"]);
    assert!((value(&v) - 0.5 * (1.0 - 3f64.sqrt() / 6.0)).abs() < 1e-14);
    assert_eq!(v["formula_path"], "averaged/general");
    let v = json(&["avg-error", "--M", "1", "--N1", "1", "--N2", "2", "--dense"]);
    let dense = v["outputs"]["dense_helstrom"]["value"].as_f64().unwrap();
    assert!((value(&v) - 0.310_148_152_9).abs() < 1e-9);
    assert!((value(&v) - dense).abs() < 1e-12);
    assert_eq!(v["outputs"]["dense_helstrom"]["formula_path"], "oracle/helstrom");
}

#[test]
fn specialized_forms_are_selectable() {
    let v = json(&["avg-error", "--M", "2", "--N1", "3", "--N2", "3", "--form", "equal-qubit"]);
    assert_eq!(v["formula_path"], "averaged/equal-qubit");
    let out = qcp(&["avg-error", "--M", "2", "--N1", "3", "--N2", "4", "--form", "equal"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn per_pair_examples() {
    let args = |q: &'static str| ["error", "--M", "1", "--N1", "1", "--N2", "1", "--q", q];
    assert_eq!(value(&json(&args("1"))), 0.5);
    assert!((value(&json(&args("0"))) - 0.211_324_865_405_187_1).abs() < 1e-12);
    let half = 2.0 / 6.0 + 0.5 * (1.0 - 3f64.sqrt() / 2.0) / 3.0;
    let v = json(&args("0.5"));
    assert!((value(&v) - half).abs() < 1e-14);
    assert!(v["outputs"]["per_k"][0]["p_k"].is_number());
    assert_eq!(qcp(&args("1.5")).status.code(), Some(2));
}

#[test]
fn rate_examples() {
    let v = json(&["rate", "--alpha", "3", "--q", "1", "--with-approx"]);
    for key in ["h_min", "approx", "chernoff"] {
        assert_eq!(v["outputs"][key].as_f64(), Some(0.0));
    }
    let h = |a: &str| json(&["rate", "--alpha", a, "--q", "0.5", "--with-approx"])["outputs"].clone();
    let (h5, h100) = (h("5"), h("100"));
    let gap = |o: &Value| (o["h_min"].as_f64().unwrap() - o["chernoff"].as_f64().unwrap()).abs();
    assert!(gap(&h100) < gap(&h5));
    assert!((h5["h_min"].as_f64().unwrap() - 0.547_11).abs() < 1e-5);
    assert!(json(&["rate", "--alpha", "5", "--q", "0.5"])["outputs"].get("approx").is_none());
    assert_eq!(qcp(&["rate", "--alpha", "5", "--q", "0"]).status.code(), Some(2));
}

#[test]
fn figure_files() {
    let dir = tempfile::tempdir().unwrap();
    let p2 = dir.path().join("fig2.csv");
    let p3 = dir.path().join("fig3.csv");
    assert!(qcp(&["fig", "2", "--out", p2.to_str().unwrap()]).status.success());
    assert!(qcp(&["fig", "3", "--out", p3.to_str().unwrap()]).status.success());
    let t2 = std::fs::read_to_string(&p2).unwrap();
    assert!(!t2.contains('\r'));
    let (h, rows) = csv_rows(&t2);
    assert_eq!(h, ["q", "h_min", "approx", "chernoff"]);
    assert_eq!(rows.len(), 100);
    assert_eq!(rows.last().unwrap(), &["1", "0", "0", "0"]);
    let f = |s: &str| s.parse::<f64>().unwrap();
    assert!(rows.iter().all(|r| f(&r[1]) <= f(&r[3])));
    let (h, rows) = csv_rows(&std::fs::read_to_string(&p3).unwrap());
    assert_eq!(h[0], "alpha");
    let gaps: Vec<f64> = rows.iter().filter(|r| f(&r[0]) >= 5.0).map(|r| (f(&r[1]) - f(&r[2])).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(qcp(&["fig", "4"]).status.code(), Some(2));
}

#[test]
fn sweep_example() {
    let out = qcp(&["sweep", "--variable", "q", "--from", "0", "--to", "1", "--steps", "11", "--M", "1", "--N1", "1", "--N2", "1", "--format", "csv"]);
    assert!(out.status.success());
    let (h, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(h, ["q", "value", "formula_path"]);
    assert_eq!(rows.len(), 11);
    assert!((rows[0][1].parse::<f64>().unwrap() - 0.211_324_865_405_187_1).abs() < 1e-12);
    assert_eq!(rows[10][1], "0.5");
}

#[test]
fn sweep_rejects_bad_specs() {
    let base = ["sweep", "--variable", "M", "--from", "0", "--to", "3", "--N1", "1", "--N2", "1"];
    let with = |steps: &str| {
        let mut a = base.to_vec();
        a.extend(["--steps", steps]);
        qcp(&a).status.code()
    };
    assert_eq!(with("4"), Some(0));
    assert_eq!(with("3"), Some(2));
    assert_eq!(with("1"), Some(2));
    let reversed = qcp(&["sweep", "--variable", "q", "--from", "1", "--to", "0", "--steps", "3", "--N1", "1", "--N2", "1"]);
    assert_eq!(reversed.status.code(), Some(2));
    let missing = qcp(&["sweep", "--variable", "alpha", "--from", "1", "--to", "2", "--steps", "2"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn integer_sweep_reports_averaged_error() {
    let v = json(&["sweep", "--variable", "M", "--from", "0", "--to", "2", "--steps", "3", "--N1", "1", "--N2", "1"]);
    let rows = v["outputs"].as_array().unwrap();
    assert_eq!(rows[0]["value"].as_f64(), Some(0.5));
    assert_eq!(rows[1]["formula_path"], "averaged/general");
}

#[test]
fn limits_example() {
    let v = json(&["limits", "--M", "1", "--d", "2"]);
    let first = &v["outputs"][0];
    assert!((first["value"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(first["formula_path"], "limit/n1-infinite");
    let v = json(&["limits", "--N2", "1"]);
    assert_eq!(v["outputs"][0]["exact"], "1/4");
    assert_eq!(qcp(&["limits"]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let out = qcp(&["verify", "--suite", "recoupling"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("PASS criterion  6"));
    assert_eq!(qcp(&["verify", "--suite", "oracle"]).status.code(), Some(2));
}

#[test]
fn replay_is_byte_identical() {
    let args = ["avg-error", "--M", "1", "--N1", "1", "--N2", "2", "--samples", "500", "--seed", "7"];
    let a = qcp(&args);
    let b = qcp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert!(v.get("timestamp").is_none());
    let c = qcp(&["avg-error", "--M", "1", "--N1", "1", "--N2", "2", "--samples", "500", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(qcp(&["fig", "3"]).stdout, qcp(&["fig", "3"]).stdout);
    let t: Value = serde_json::from_slice(&qcp(&["rate", "--alpha", "2", "--q", "0.3", "--timestamp"]).stdout).unwrap();
    assert!(t["timestamp"].as_str().unwrap().starts_with("unix:"));
}

#[test]
fn stochastic_runs_need_a_seed() {
    let out = qcp(&["avg-error", "--M", "1", "--N1", "1", "--N2", "1", "--samples", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(qcp(&["fig", "2", "--out", "/nonexistent-dir/x.csv"]).status.code(), Some(3));
    assert_eq!(qcp(&["avg-error", "--N1", "1"]).status.code(), Some(2));
    assert_eq!(qcp(&["avg-error", "--M", "0", "--N1", "0", "--N2", "0"]).status.code(), Some(2));
    let out = qcp(&["avg-error", "--M", "0", "--N1", "0", "--N2", "0"]);
    assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);
}

#[test]
fn dimension_cap() {
    let args = ["avg-error", "--M", "1", "--N1", "1", "--N2", "1", "--dense"];
    let mut capped = args.to_vec();
    capped.extend(["--dim-cap", "4"]);
    assert_eq!(qcp(&capped).status.code(), Some(2));
    let env = Command::new(env!("CARGO_BIN_EXE_qcp")).args(args).env("QCP_DIM_CAP", "4").output().unwrap();
    assert_eq!(env.status.code(), Some(2));
    assert!(qcp(&args).status.success());
}
