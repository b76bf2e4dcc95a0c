use std::path::PathBuf;
use std::process::{Command, Output};

use pairblow_core::degen::{DerivationTrace, Status};
use pairblow_core::dimsolve::GateCertificate;
use serde_json::Value;

fn pairblow(args: &[&str], oracle: Option<&PathBuf>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pairblow"));
    cmd.args(args).env_remove("PAIRBLOW_ORACLE");
    if let Some(p) = oracle {
        cmd.env("PAIRBLOW_ORACLE", p);
    }
    cmd.output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gate_file(theorem: &str, index: usize) -> PathBuf {
    let o = pairblow(&["gates", "--theorem", theorem], None);
    assert_eq!(o.status.code(), Some(0));
    let all: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
    scratch(&format!("{theorem}-{index}.json"), &all[index].to_string())
}

#[test]
fn solve_gate_lemma_point() {
    let o = pairblow(
        &["solve-gate", gate_file("lemma3.3", 0).to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let cert: GateCertificate = serde_json::from_slice(&o.stdout).unwrap();
    let sols = cert.verdict.solutions();
    assert_eq!(sols.len(), 1);
    assert_eq!((sols[0].len, sols[0].size, sols[0].dual_codim), (1, 1, 0));
}

#[test]
fn solve_gate_vanishing() {
    let o = pairblow(
        &[
            "solve-gate",
            gate_file("pt0", 5).to_str().unwrap(),
            "--format",
            "text",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no solution"), "{}", stdout(&o));
}

#[test]
fn solve_gate_refuses_without_dominance() {
    let f = scratch(
        "syn.json",
        r#"{"label": "syn", "lhs": {"S": 1, "n": 1}, "rhs": {"l": 1}}"#,
    );
    let o = pairblow(&["solve-gate", f.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("refused"));
}

#[test]
fn input_errors_exit_2() {
    let bad = scratch("bad.json", "{ not json");
    assert_eq!(
        pairblow(&["solve-gate", bad.to_str().unwrap()], None)
            .status
            .code(),
        Some(2)
    );
    let shape = scratch("shape.json", r#"{"label": "x"}"#);
    assert_eq!(
        pairblow(&["solve-gate", shape.to_str().unwrap()], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pairblow(&["verify", "--theorem", "pt9"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pairblow(&["verify", "--theorem", "pt0", "--k", "3..1"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pairblow(&["verify", "--theorem", "pt1", "--enum-bound", "0"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(pairblow(&["verify"], None).status.code(), Some(2));
    let missing = PathBuf::from("/nonexistent/oracle.json");
    assert_eq!(
        pairblow(&["oracle", "list"], Some(&missing)).status.code(),
        Some(2)
    );
}

#[test]
fn verify_json_round_trips_and_matches_text() {
    let o = pairblow(&["verify", "--theorem", "pt3", "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0));
    let trace: DerivationTrace = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(trace.status, Status::Verified);
    assert_eq!(
        serde_json::to_string_pretty(&trace).unwrap().trim_end(),
        stdout(&o).trim_end()
    );
    let text = pairblow(&["verify", "--theorem", "pt3"], None);
    assert!(stdout(&text).starts_with("pt3: VERIFIED"));
    assert!(stdout(&text).contains(&format!("result: {}", trace.result)));
}

#[test]
fn verify_all_is_ordered_and_writes_out() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("all.json");
    let o = pairblow(
        &[
            "verify",
            "--all",
            "--format",
            "json",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let traces: Vec<DerivationTrace> =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let ids: Vec<&str> = traces.iter().map(|t| t.theorem.as_str()).collect();
    assert_eq!(ids, pairblow_core::degen::ALL_IDS.to_vec());
}

#[test]
fn curve2_sharpness_exit_1() {
    let o = pairblow(
        &[
            "verify",
            "--theorem",
            "curve2",
            "--c-bound",
            "1",
            "--format",
            "json",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    let trace: DerivationTrace = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(trace.status, Status::Mismatch);
}

#[test]
fn oracle_list_and_check() {
    let o = pairblow(&["oracle", "list", "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0));
    let entries: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(entries.len(), 6);
    assert!(entries
        .iter()
        .all(|e| !e["provenance"].as_str().unwrap().is_empty()));

    let o = pairblow(&["oracle", "check"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("stored 1*q^1: ok"));

    let mut tampered = entries.clone();
    for e in &mut tampered {
        if e["symbol"] == "Z(P3~; tau0(pt))_F" {
            e["value"] = Value::from("2*q^1");
        }
    }
    let path = scratch("tampered.json", &Value::from(tampered).to_string());
    let o = pairblow(&["oracle", "check"], Some(&path));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("DISAGREES"));
    let o = pairblow(&["verify", "--theorem", "pt2"], Some(&path));
    assert_eq!(o.status.code(), Some(1));
}
