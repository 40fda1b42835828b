use std::process::{Command, Output};

use serde_json::Value;

fn stl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stl")).args(args).output().expect("stl runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report on stdout")
}

#[test]
fn trace_check_passes_and_prints_the_report() {
    let out = stl(&["trace-check", "--seed", "5", "--trials", "4", "--dim", "6", "--rank", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = report(&out);
    assert_eq!(v["config"]["dim"], 6);
    assert_eq!(v["results"].as_array().unwrap().len(), 4);
    assert_eq!(v["summary"]["pass"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace-check: PASS"));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let args = ["continuity", "--seed", "17", "--trials", "20"];
    let a = stl(&args);
    let b = stl(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, stl(&["continuity", "--seed", "18", "--trials", "20"]).stdout);
}

#[test]
fn det_compare_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("det.csv");
    let out = stl(&["det-compare", "--seed", "3", "--trials", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 64);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("det.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "det-compare");
    assert_eq!(summary["summary"]["pass"], true);
}

#[test]
fn failing_threshold_exits_with_one() {
    let out = stl(&["factor-check", "--seed", "1", "--trials", "3", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out);
    assert_eq!(v["summary"]["pass"], false);
    assert!(!v["summary"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_with_two() {
    // missing seed
    assert_eq!(stl(&["trace-check"]).status.code(), Some(2));
    assert_eq!(stl(&["no-such-command", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(stl(&["trace-check", "--seed", "1", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(stl(&["trace-check", "--seed", "1", "--p", "3"]).status.code(), Some(2));
    // off the admissibility surface without the flag
    let out = stl(&["trace-check", "--seed", "1", "--r", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--unsafe-exponents"));
}

#[test]
fn unsafe_exponents_mark_the_report() {
    let out = stl(&["trace-check", "--seed", "1", "--trials", "2", "--r", "0.9", "--unsafe-exponents"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["exploratory"], true);
}
