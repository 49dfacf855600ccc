use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nkverify")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exited normally")
}

#[test]
fn exit_statuses() {
    assert_eq!(code(&["verify-theorem-b", "2"]), 0);
    assert_eq!(code(&["reproduce-table", "3"]), 0);
    // two golden rows disagree with the computed tables
    assert_eq!(code(&["reproduce-table", "all"]), 1);
    assert_eq!(code(&["reproduce-table", "9"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn json_reports_have_the_expected_shape() {
    let out = run(&["reproduce-table", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = v.as_array().expect("array of reports");
    assert_eq!(reports.len(), 1);
    let r = &reports[0];
    assert_eq!(r["suite"], "table-2");
    assert!(r["checksum"].as_str().is_some_and(|s| !s.is_empty()));
    let items = r["items"].as_array().unwrap();
    assert!(!items.is_empty());
    for it in items {
        assert!(it["id"].is_string());
        assert_eq!(it["status"], "pass");
    }
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let out = run(&["verify-theorem-b", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let suites: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["suite"].as_str().unwrap()).collect();
    assert_eq!(suites.len(), 2);
}

#[test]
fn json_is_byte_identical_across_runs() {
    for args in [
        &["numeric-s6", "--format", "json"][..],
        &["verify-theorem-a", "--format", "json"][..],
    ] {
        let (a, b) = (run(args), run(args));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seed_changes_the_numeric_report() {
    let a = run(&["numeric-s6", "--format", "json", "--seed", "1"]);
    let b = run(&["numeric-s6", "--format", "json", "--seed", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn csv_and_dump() {
    let out = run(&["verify-theorem-b", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() > 1);
    let out = run(&["dump-model", "flagc3"]);
    assert!(out.status.success());
    assert!(!out.stdout.is_empty());
}
