use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn plt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plt")).args(args).output().expect("binary runs")
}

fn state(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "states", name].iter().collect();
    p.to_str().unwrap().to_owned()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn close(v: &Value, expect: &[f64], eps: f64) -> bool {
    let a = v.as_array().unwrap();
    a.len() == expect.len() && a.iter().zip(expect).all(|(x, y)| (x.as_f64().unwrap() - y).abs() <= eps)
}

#[test]
fn analyze_bell() {
    let o = plt(&["analyze", &state("bell.json")]);
    assert_eq!(o.status.code(), Some(1));
    let r = stdout_json(&o);
    assert_eq!(r["verdict"]["status"], "Entangled");
    assert!(close(&r["verdict"]["mu"], &[1.0, 1.0, 1.0, 1.0], 1e-12));
    assert!(r["decomposition"].is_null());
    assert_eq!(r["ppt"]["agrees"], true);
    assert_eq!(r["input"]["sha256"].as_str().unwrap().len(), 64);
    assert!(r["timings"].is_object());
}

#[test]
fn analyze_maximally_mixed() {
    let o = plt(&["analyze", &state("mixed.json"), "--no-timings"]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    assert_eq!(r["verdict"]["status"], "Separable");
    assert!(close(&r["verdict"]["mu"], &[1.0, 0.0, 0.0, 0.0], 1e-12));
    assert!(r["decomposition"]["check"]["residual"].as_f64().unwrap() <= 1e-9);
    assert!(r.get("timings").is_none());
}

#[test]
fn analyze_not_a_state_cites_third_inequality() {
    let o = plt(&["analyze", &state("notastate.json")]);
    assert_eq!(o.status.code(), Some(2));
    let r = stdout_json(&o);
    assert_eq!(r["verdict"]["status"], "NotAState");
    assert_eq!(r["verdict"]["failed_conditions"], serde_json::json!([3]));
    assert!(String::from_utf8_lossy(&o.stderr).contains("[3]"));
}

#[test]
fn analyze_is_deterministic_without_timings() {
    let a = plt(&["analyze", &state("werner_0.25.json"), "--no-timings"]);
    let b = plt(&["analyze", &state("werner_0.25.json"), "--no-timings"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_reads_csv_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("w.csv");
    let out = dir.path().join("report.json");
    let s = plt(&["sample", "--kind", "werner", "--p", "0.6", "-o", csv.to_str().unwrap()]);
    assert_eq!(s.status.code(), Some(0));
    let o = plt(&["analyze", csv.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(r["input"]["format"], "csv");
    assert_eq!(r["verdict"]["status"], "Entangled");
}

#[test]
fn strict_flag_drops_the_boundary_band() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("w.json");
    plt(&["sample", "--kind", "werner", "--p", "0.333333334", "-o", f.to_str().unwrap()]);
    let banded = stdout_json(&plt(&["analyze", f.to_str().unwrap()]));
    assert_eq!(banded["verdict"]["near_boundary"], true);
    let strict = stdout_json(&plt(&["analyze", f.to_str().unwrap(), "--strict"]));
    assert_eq!(strict["verdict"]["near_boundary"], false);
    assert_eq!(strict["tolerances"]["boundary"], 0.0);
}

#[test]
fn bad_input_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, "{\"rho\": [[1, 2]]}").unwrap();
    assert_eq!(plt(&["analyze", f.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(plt(&["analyze", "/nonexistent/x.json"]).status.code(), Some(3));
    assert_eq!(plt(&["analyze", &state("bell.json"), "--tol-psd", "-1"]).status.code(), Some(3));
    assert_eq!(plt(&["frobnicate"]).status.code(), Some(3));
}

#[test]
fn decompose_werner() {
    let o = plt(&["decompose", &state("werner_0.25.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    assert!(r["check"]["residual"].as_f64().unwrap() <= 1e-9);
    let terms = r["decomposition"]["terms"].as_array().unwrap();
    assert!(!terms.is_empty());
    assert!(terms.iter().all(|t| t["weight"].as_f64().unwrap() > 0.0));
}

#[test]
fn decompose_refuses_bell() {
    let o = plt(&["decompose", &state("bell.json")]);
    assert_eq!(o.status.code(), Some(1));
    let r = stdout_json(&o);
    assert!((r["margin"].as_f64().unwrap() + 2.0).abs() < 1e-12);
    assert!(r["refusal"].is_string());
    assert!(r.get("decomposition").is_none());
}

#[test]
fn decompose_product_is_one_term() {
    let o = plt(&["decompose", &state("product_00.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    assert_eq!(r["state_type"], "TypeII0c");
    assert_eq!(r["decomposition"]["terms"].as_array().unwrap().len(), 1);
}

#[test]
fn decompose_all_null_factors_are_pure() {
    let o = plt(&["decompose", &state("werner_0.25.json"), "--all-null"]);
    let r = stdout_json(&o);
    assert!(r["check"]["min_factor_eigenvalue"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn crosscheck_agrees_and_is_deterministic() {
    let a = plt(&["crosscheck", "-n", "300", "--seed", "11", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    let r = stdout_json(&a);
    assert_eq!(r["disagree"], 0);
    assert_eq!(r["agree"].as_u64().unwrap() + r["excluded"].as_u64().unwrap(), 300);
    let b = plt(&["crosscheck", "-n", "300", "--seed", "11", "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn crosscheck_pure_states() {
    let r = stdout_json(&plt(&["crosscheck", "-n", "10", "--rank", "1", "--json"]));
    assert_eq!(r["disagree"], 0);
    // random pure states are entangled with probability one
    assert!(r["entangled_fraction"].as_f64().unwrap() > 0.0);
}

#[test]
fn crosscheck_rejects_empty_sample() {
    assert_eq!(plt(&["crosscheck", "-n", "0"]).status.code(), Some(3));
}

#[test]
fn scan_region_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = plt(&["scan-region", "-k", "5", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["mu1", "mu2", "mu3", "class"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    // two closed octants of a 5-point grid share the origin
    assert_eq!(rows.len(), 27 + 27 - 1);
    let class_at = |m: [&str; 3]| {
        rows.iter().find(|r| r[0] == *m[0] && r[1] == *m[1] && r[2] == *m[2]).map(|r| r[3].to_string())
    };
    assert_eq!(class_at(["1", "1", "1"]).unwrap(), "entangled");
    assert_eq!(class_at(["-1", "-1", "-1"]).unwrap(), "not_a_state");
    assert_eq!(class_at(["0", "0", "0"]).unwrap(), "separable");
}

#[test]
fn scan_region_options() {
    let o = plt(&["scan-region", "-k", "3", "--full-cube", "--type-ii"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "mu1,mu2,mu3,class");
    assert_eq!(lines.iter().filter(|l| l.contains("type_ii")).count(), 6);
    assert_eq!(lines.len(), 1 + 27 + 6);
    assert_eq!(plt(&["scan-region", "-k", "1"]).status.code(), Some(3));
}

#[test]
fn sample_kinds() {
    let w = plt(&["sample", "--kind", "werner", "--p", "0.3"]);
    assert_eq!(w.status.code(), Some(0));
    let rho = stdout_json(&w);
    // p |Φ⁺⟩⟨Φ⁺| + (1 − p) I/4
    assert!((rho["rho"][0][0][0].as_f64().unwrap() - 0.325).abs() < 1e-12);
    assert_eq!(plt(&["sample", "--kind", "werner"]).status.code(), Some(3));
    assert_eq!(plt(&["sample", "--kind", "werner", "--p", "1.5"]).status.code(), Some(3));
    let p = plt(&["sample", "--kind", "product", "--u", "0,0,-1", "--v", "1,0,0"]);
    assert_eq!(p.status.code(), Some(0));
    assert_eq!(plt(&["sample", "--kind", "product", "--u", "0,0"]).status.code(), Some(3));
    assert_eq!(plt(&["sample", "--kind", "random-mixed", "--seed", "5", "--rank", "2"]).status.code(), Some(0));
}
