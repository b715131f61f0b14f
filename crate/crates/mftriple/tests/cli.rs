//! End-to-end checks of the binary: exit codes and byte-for-byte
//! determinism of outputs given identical flags and seed.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mftriple"))
}

#[test]
fn usage_errors_exit_2() {
    let out = bin().args(["triple1", "--q", "3", "--nu0", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "decomposable nu0 is a usage error");
    assert!(!out.stderr.is_empty());
    let out = bin().args(["no-such-command"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites_exit_zero() {
    let out = bin().args(["verify", "kloosterman", "--q", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // Every line is a JSON report with pass = true.
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let doc: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(doc["pass"], serde_json::Value::Bool(true));
    }
    let out = bin().args(["verify", "normal"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn ggr_reports_multiplicity_free() {
    let out = bin().args(["ggr", "--q", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["mf"]["mf"], serde_json::Value::Bool(true));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for args in [
        vec!["triple1", "--q", "3", "--nu0", "1", "--constituent", "cuspidal:5"],
        vec!["triple", "analyze", "--q", "3", "--k", "C", "--theta", "nu:1", "--seed", "7"],
        vec!["kloosterman", "--q", "5", "--nu", "2", "--verify"],
        vec!["verify", "all", "--q", "3"],
    ] {
        let a = bin().args(&args).output().unwrap();
        let b = bin().args(&args).output().unwrap();
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(a.stdout, b.stdout, "nondeterministic output for {args:?}");
    }
}

#[test]
fn csv_header_and_shape() {
    let out = bin()
        .args(["triple1", "--q", "3", "--nu0", "1", "--constituent", "parabolic:0,1", "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "g_index,a,b,c,d,re,im");
    assert_eq!(lines.count(), 48);
}
