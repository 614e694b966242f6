use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("int").chain(args.iter().copied());
    let code = int_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s.trim()).unwrap_or_else(|e| panic!("{e}: {s}"))
}

#[test]
fn generate_then_verify_stats_and_prove() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.jsonl");
    let data = data.to_str().unwrap();
    let (code, out, _) = run(&["generate", "--k", "3", "--l", "5", "--num", "10", "--seed", "7", "--out", data]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["written"], 10);

    let (code, out, _) = run(&["verify", "--in", data]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["verified"], 10);

    let (code, out, _) = run(&["stats", "--in", data]);
    assert_eq!(code, 0);
    let stats = json(&out);
    assert_eq!(stats["theorems"], 10);
    assert_eq!(stats["proof_steps"], 50);

    let report = dir.path().join("report.jsonl");
    let (code, out, _) = run(&[
        "prove", "--in", data, "--method", "greedy", "--policy", "oracle", "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["solved"], 10);
    assert_eq!(std::fs::read_to_string(report).unwrap().lines().count(), 10);

    let (code, out, _) = run(&["prove", "--in", data, "--sims", "20", "--seed", "1"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["theorems"], 10);
}

#[test]
fn generation_to_stdout_is_deterministic() {
    let a = run(&["generate", "--axioms", "field", "--k", "2", "--l", "3", "--num", "5", "--seed", "3"]);
    let b = run(&["generate", "--axioms", "field", "--k", "2", "--l", "3", "--num", "5", "--seed", "3"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.1.lines().count(), 5);
}

#[test]
fn tampered_records_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.jsonl");
    let (code, out, _) = run(&["generate", "--k", "2", "--l", "3", "--num", "3"]);
    assert_eq!(code, 0);
    let mut lines: Vec<Value> = out.lines().map(json).collect();
    lines[1]["proof"].as_array_mut().unwrap().pop();
    let mut text = String::new();
    for l in &lines {
        text.push_str(&l.to_string());
        text.push('\n');
    }
    std::fs::write(&data, text).unwrap();
    let (code, out, err) = run(&["verify", "--in", data.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["verified"], 2);
    assert_eq!(json(&err)["error"]["code"], "VERIFY_FAILED");
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = run(&["generate", "--k", "5", "--l", "3"]);
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"]["code"], "USAGE");
    assert_eq!(run(&["generate", "--l", "3"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["split", "--k", "2", "--l", "3", "--dimension", "sideways", "--out-dir", "x"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("generate"));
}

#[test]
fn missing_input_is_a_failure() {
    let (code, _, err) = run(&["stats", "--in", "/nonexistent/data.jsonl"]);
    assert_eq!(code, 1);
    assert_eq!(json(&err)["error"]["code"], "DATASET");
}

#[test]
fn split_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&[
        "split", "--k", "2", "--l", "3", "--dimension", "orders", "--orders", "10", "--test-orders", "20",
        "--test-size", "30", "--train-size", "40", "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let summary = json(&out);
    assert_eq!(summary["test"], 30);
    assert_eq!(summary["train"], 40);
    assert_eq!(std::fs::read_to_string(dir.path().join("test.jsonl")).unwrap().lines().count(), 30);
    assert_eq!(std::fs::read_to_string(dir.path().join("train.jsonl")).unwrap().lines().count(), 40);
}

#[test]
fn bench_reports_against_the_reference() {
    let (code, out, _) = run(&["bench", "--steps", "500"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["steps"], 500);
    assert_eq!(r["reference_ms"], 1.28);
    assert_eq!(r["within_reference"], true);
}

#[test]
fn binary_serves_over_stdio() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_int"))
        .args(["serve", "--transport", "stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let stdin = child.stdin.as_mut().unwrap();
        writeln!(stdin, "not json").unwrap();
        writeln!(stdin, r#"{{"op":"close","id":3,"session":1}}"#).unwrap();
        writeln!(stdin, r#"{{"op":"generate","id":4,"k":2,"l":3,"num":1}}"#).unwrap();
    }
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success());
    let lines: Vec<Value> = String::from_utf8(output.stdout).unwrap().lines().map(json).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["error"]["code"], "BAD_REQUEST");
    assert_eq!(lines[1]["error"]["code"], "SESSION_NOT_FOUND");
    assert_eq!(lines[1]["id"], 3);
    assert_eq!(lines[2]["records"].as_array().unwrap().len(), 1);
}
