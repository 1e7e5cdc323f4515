use std::process::{Command, Output};

use serde_json::Value;

fn gfcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gfcount")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const FIRST_ROW: &str = r#"{"p": 2, "s": 4, "a": [1,1,1,1,1], "b": "nonpower",
    "m": [2,4,6,8,10], "kj": [5,5,10,10,10], "k": 10}"#;

#[test]
fn count_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row.json");
    std::fs::write(&path, FIRST_ROW).unwrap();
    let out = gfcount(&["count", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["closed_form_value"], "18076");
    assert_eq!(v["closed_form_method"], "coprime_nonpower");
    assert_eq!(v["oracle_value"], "18076");
    assert_eq!(v["agreement"], true);
    assert_eq!(v["equation"]["b"], 2);
}

#[test]
fn output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row.json");
    std::fs::write(&path, FIRST_ROW).unwrap();
    let a = gfcount(&["count", path.to_str().unwrap(), "--list-characters"]);
    let b = gfcount(&["--threads", "1", "count", path.to_str().unwrap(), "--list-characters"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a)["characters"].as_array().unwrap().len() == 5);
}

#[test]
fn inline_carlitz_ternary() {
    let out = gfcount(&["count", "--p", "7", "--a", "1,1,1", "--b", "3", "--m", "1,1,1", "--kj", "1,1,1", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["closed_form_value"], "50");
    assert!(v["closed_forms"].as_array().unwrap().iter().any(|c| c["method"] == "carlitz_ternary"));
}

#[test]
fn malformed_input_exits_1() {
    let out = gfcount(&["count", "--p", "7", "--a", "1,1", "--b", "1", "--m", "1", "--kj", "1,1", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m has 1 entries"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"p": 7, "a": [1], "b": 1}"#).unwrap();
    assert_eq!(gfcount(&["count", path.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(gfcount(&["count", "/nonexistent/spec.json"]).status.code(), Some(1));
    assert_eq!(gfcount(&["count", "--p", "6", "--a", "1,1", "--b", "1", "--m", "1,1", "--kj", "1,1", "--k", "1"]).status.code(), Some(1));
    assert_eq!(gfcount(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(gfcount(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_tables_passes() {
    let out = gfcount(&["verify-tables"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.ends_with(" ok")).count(), 14);
    assert!(text.contains("539998021"));
    assert!(text.contains("five 1s"));
}

#[test]
fn derive_tsum_and_all_b() {
    let args = ["--p", "7", "--a", "1,1", "--b", "1", "--m", "2,2", "--kj", "2,2", "--k", "2"];
    let out = gfcount(&[&["derive"][..], &args].concat());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["derived"]["power_gcd"], 2);
    assert!(v["applicability"]["reasons"].is_array());

    let out = gfcount(&[&["tsum"][..], &args].concat());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), v[0]["coefficients"].as_array().map(|_| 6).unwrap());

    let out = gfcount(&[&["count", "--all-b"][..], &args].concat());
    let v = json(&out);
    assert_eq!(v["b_profile"]["entries"].as_array().unwrap().len(), 6);
    assert_eq!(v["b_profile"]["nonpower_counts"].as_array().unwrap().len(), 1);
}

#[test]
fn selftest_quick_run() {
    let out = gfcount(&["selftest", "--seed", "3", "--budget", "30", "--cases", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["suites"].as_array().unwrap().len(), 5);
}
