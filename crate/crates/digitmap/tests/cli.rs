//! End-to-end CLI checks: exit codes, JSON schema conformance, determinism.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_digitmap"))
        .args(args)
        .env_remove("DIGITMAP_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn validator(name: &str) -> jsonschema::Validator {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/schemas");
    let load = |f: &str| -> Value {
        serde_json::from_str(&std::fs::read_to_string(format!("{dir}/{f}")).unwrap()).unwrap()
    };
    let registry = jsonschema::Registry::new()
        .add("digitmap:common", load("common.schema.json"))
        .unwrap()
        .prepare()
        .unwrap();
    jsonschema::options()
        .with_registry(&registry)
        .build(&load(name))
        .unwrap()
}

fn assert_valid(schema: &str, payload: &str) {
    let v: Value = serde_json::from_str(payload).expect("payload is JSON");
    let validator = validator(schema);
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema}: {errors:?}\npayload: {payload}");
}

#[test]
fn analyze_is_valid_and_deterministic() {
    let a = run(&["analyze", "--e", "2", "--b", "10", "--format", "json"]);
    assert!(a.status.success());
    assert_valid("analyze.schema.json", &stdout(&a));
    let b = run(&["analyze", "--e", "2", "--b", "10", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout, "output must be byte-identical");
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["threshold"], 999);
    assert_eq!(v["cycles"][1][0], 4);
}

#[test]
fn check_power_map_passes() {
    let out = run(&["check", "--e", "2", "--b", "10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_valid("check.schema.json", &stdout(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ok"], true);
    assert!(v["m_star_candidates"]
        .as_array()
        .unwrap()
        .contains(&Value::from(2)));
}

#[test]
fn check_digit_sum_map_file_fails() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"base": 10, "table": [0,1,2,3,4,5,6,7,8,9]}}"#).unwrap();
    let path = file.path().to_str().unwrap();
    let out = run(&["check", "--map", path, "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_valid("check.schema.json", &stdout(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["ok"], false);
}

#[test]
fn map_file_power_spec_works() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"base": 10, "exponent": 2}}"#).unwrap();
    let path = file.path().to_str().unwrap();
    let out = run(&["check", "--map", path, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn sieve_first_triple_at_1880() {
    let out = run(&[
        "sieve", "--e", "2", "--b", "10", "--u", "1", "--bound", "10000", "--min-len", "3",
        "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let first = text.lines().next().unwrap();
    assert_valid("run_record.schema.json", first);
    let v: Value = serde_json::from_str(first).unwrap();
    assert_eq!(v["start"], 1880);
    for line in text.lines() {
        assert_valid("run_record.schema.json", line);
    }
}

#[test]
fn sieve_respects_threads_env() {
    let base = run(&[
        "sieve", "--e", "2", "--b", "10", "--u", "4", "--bound", "300000", "--min-len", "5",
        "--format", "json",
    ]);
    let threaded = Command::new(env!("CARGO_BIN_EXE_digitmap"))
        .args([
            "sieve", "--e", "2", "--b", "10", "--u", "4", "--bound", "300000", "--min-len", "5",
            "--format", "json",
        ])
        .env("DIGITMAP_THREADS", "8")
        .output()
        .unwrap();
    assert_eq!(base.stdout, threaded.stdout);
}

#[test]
fn classify_big_integer() {
    let out = run(&[
        "classify",
        "123456789012345678901234567890123",
        "--e", "2", "--b", "10",
        "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_valid("classify.schema.json", &stdout(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["u"], 4); // defaults to the least element of the landing cycle
    assert_eq!(v["is_u_integer"], true);
}

#[test]
fn witness_payloads_validate() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["--kind", "shift", "--x", "3", "--m", "99", "--r", "2"],
        vec!["--kind", "preimage", "--u", "1", "--a", "42", "--strategy", "construct"],
        vec![
            "--kind", "preimage", "--u", "4", "--a", "3", "--anchor", "16", "--strategy",
            "construct",
        ],
        vec!["--kind", "pair", "--u", "1", "--x", "2", "--strategy", "construct"],
        vec!["--kind", "pair", "--u", "4", "--x", "1"],
        vec!["--kind", "shiftall", "--u", "4", "--budget", "200000"],
        vec!["--kind", "run", "--u", "1", "--n", "3", "--budget", "100000"],
        vec!["--kind", "run", "--u", "4", "--n", "5", "--budget", "100000"],
    ];
    for case in cases {
        let mut args = vec!["witness"];
        args.extend(&case);
        args.extend(["--e", "2", "--b", "10", "--format", "json"]);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{case:?}: {}", stdout(&out));
        assert_valid("witness.schema.json", &stdout(&out));
        let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
        let checks = v["verification"]["checks"].as_array().unwrap();
        assert!(checks.iter().all(|c| c["pass"] == true), "{case:?}");
    }
}

#[test]
fn happy_payload_validates() {
    let out = run(&["happy", "--e", "2", "--b", "10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_valid("happy.schema.json", &stdout(&out));
    let out = run(&["happy", "--e", "3", "--b", "10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1)); // 2 | b-1 and 2 | e-1
    assert_valid("happy.schema.json", &stdout(&out));
}

#[test]
fn error_exit_codes_and_payloads() {
    // 2: conflicting map sources
    let out = run(&[
        "analyze", "--e", "2", "--b", "10", "--base", "10", "--table", "0,1", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_valid("error.schema.json", &stdout(&out));

    // 3: depth exceeded
    let out = run(&[
        "witness", "--kind", "shift", "--x", "1", "--m", "9", "--r", "9", "--e", "2", "--b",
        "10", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_valid("error.schema.json", &stdout(&out));

    // 3: budget exhausted
    let out = run(&[
        "witness", "--kind", "shiftall", "--u", "1", "--budget", "1000", "--e", "2", "--b",
        "10", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_valid("error.schema.json", &stdout(&out));

    // 1: witness on a map whose premises fail
    let out = run(&[
        "witness", "--kind", "pair", "--u", "1", "--x", "1", "--base", "10", "--table",
        "0,1,2,3,4,5,6,7,8,9", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_valid("error.schema.json", &stdout(&out));
}
