use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn macsk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macsk"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("MACSK_MAX_TABLE_ENTRIES")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = macsk(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn error_of(out: &Output) -> (i32, String) {
    let v: Value = serde_json::from_slice(&out.stderr).expect("JSON error object");
    (out.status.code().unwrap(), v["error"]["kind"].as_str().unwrap().to_string())
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn rstar_on_bundled_adder() {
    let r = report(&["rstar", "--channel", path(&data("adder.json"))]);
    assert_eq!(r["report_version"], 1);
    assert!((r["results"]["rate"].as_f64().unwrap() - 0.75).abs() < 1e-3);
    let x = report(&["rstar", "--channel", path(&data("xor.json"))]);
    assert!((x["results"]["rate"].as_f64().unwrap() - 0.5).abs() < 1e-3);
}

#[test]
fn malformed_channel_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, r#"{"in1": 2, "in2": 2, "out": 3, "w": [[[1, 0, 0]]]}"#).unwrap();
    assert_eq!(error_of(&macsk(&["rstar", "--channel", f.to_str().unwrap()])), (2, "schema".into()));
    std::fs::write(&f, "not json").unwrap();
    assert_eq!(error_of(&macsk(&["rstar", "--channel", f.to_str().unwrap()])), (2, "schema".into()));
}

#[test]
fn missing_file_and_budget_have_distinct_codes() {
    let missing = macsk(&["rstar", "--channel", "/definitely/not/here.json"]);
    assert_eq!(error_of(&missing), (3, "file_not_found".into()));
    let out = Command::new(env!("CARGO_BIN_EXE_macsk"))
        .args([
            "check-interactive",
            "--proto",
            path(&data("interactive_two_rounds.json")),
            "--law",
            path(&data("three_bits_law.json")),
        ])
        .env("MACSK_MAX_TABLE_ENTRIES", "4")
        .output()
        .unwrap();
    assert_eq!(error_of(&out), (4, "budget".into()));
}

#[test]
fn usage_errors_do_not_collide_with_schema() {
    let out = macsk(&["rstar"]);
    assert_eq!(error_of(&out), (64, "usage".into()));
    // A stochastic command without a seed is rejected.
    let out = macsk(&["sk-se", "--channel", path(&data("adder.json")), "--n", "2", "--trials", "5"]);
    assert_eq!(error_of(&out).0, 64);
}

#[test]
fn same_seed_same_report() {
    let adder = data("adder.json");
    let args = [
        "sk-feedback",
        "--channel",
        path(&adder),
        "--k",
        "20",
        "--slack",
        "2",
        "--blocks",
        "60",
        "--dsw",
        "0.2",
        "--seed",
        "5",
    ];
    let a = macsk(&args);
    let b = macsk(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["results"]["agreement"], 1.0);
    assert_eq!(r["results"]["s_in_mode"], "estimate");
    assert_eq!(r["provenance"]["seed"], 5);
}

#[test]
fn protocol_file_runs_exactly_and_sampled() {
    let exact = report(&["sk-run", "--proto", path(&data("ct_adder_n1.json")), "--exact"]);
    assert!((exact["results"]["agreement"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(exact["results"]["s_in"], 0.0);
    assert_eq!(exact["results"]["s_in_mode"], "exact");
    let sampled = report(&["sk-run", "--proto", path(&data("ct_adder_n1.json")), "--trials", "2000", "--seed", "1"]);
    let ag = sampled["results"]["agreement"].as_f64().unwrap();
    // Four standard deviations of a 2000-sample mean.
    assert!((ag - 0.75).abs() < 4.0 * (0.75f64 * 0.25 / 2000.0).sqrt(), "{ag}");
    let ci = &sampled["results"]["agreement_ci"];
    assert!(ci[0].as_f64().unwrap() <= ag && ag <= ci[1].as_f64().unwrap());
    assert_eq!(sampled["results"]["samples"], 2000);
}

#[test]
fn bound_and_interactive_checks() {
    let b = report(&["bound", "--law", path(&data("shared_bit_law.json")), "--eps", "0.01"]);
    let r = &b["results"];
    assert!(r["log_k"].as_f64().unwrap() <= r["bound_bits"].as_f64().unwrap());
    let c = report(&[
        "check-interactive",
        "--proto",
        path(&data("interactive_two_rounds.json")),
        "--law",
        path(&data("three_bits_law.json")),
        "--random-partitions",
        "10",
        "--seed",
        "4",
    ]);
    assert_eq!(c["results"]["inequality_holds"], true);
    assert!(c["results"]["factorization"]["max_gap"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn feedback_code_commands() {
    let r = report(&["fbcode-rate", "--k", "100000", "--slack", "2"]);
    assert!((r["results"]["rate"].as_f64().unwrap() - 0.7601875).abs() < 0.003 + 1e-9);
    assert!(r["results"]["k0"].as_u64().is_some());
    let s = report(&["simulate-code", "--channel", path(&data("adder.json")), "--k", "50", "--trials", "100", "--seed", "2"]);
    for key in ["rate", "uncertainty", "error_prob", "ci"] {
        assert!(!s["results"][key].is_null(), "{key}");
    }
}

#[test]
fn source_emulation_exact_is_secret() {
    let r = report(&["sk-se", "--channel", path(&data("adder.json")), "--n", "4"]);
    assert_eq!(r["results"]["s_in"], 0.0);
    assert_eq!(r["results"]["s_in_mode"], "exact");
}

#[test]
fn verify_suite_reports_injected_xor() {
    let ok = macsk(&["verify-suite", "quick"]);
    assert!(ok.status.success());
    let bad = macsk(&["verify-suite", "quick", "--inject-xor"]);
    assert_eq!(bad.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&bad.stdout).unwrap();
    let failing: Vec<&Value> = r["results"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    let lemma = failing.iter().find(|c| c["name"] == "interactive_inequality").expect("reported");
    assert_eq!(lemma["failures"][0]["detail"]["lhs"], 1.0);
    assert_eq!(lemma["failures"][0]["detail"]["rhs"], 2.0);
    assert!(lemma["failures"][0]["seed"].as_u64().is_some());
}

#[test]
fn out_flag_writes_file_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.json");
    let out = macsk(&["fbcode-rate", "--k", "1000", "--out", f.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("fbcode-rate"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(v["command"], "fbcode-rate");
}
