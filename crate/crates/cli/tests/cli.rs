use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_demifield"))
        .args(args)
        .env_remove("DEMIFIELD_WORKERS")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_a_reproducible_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("field_ma.json");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = run(&["gen", "--config", path(&cfg), "--out", path(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i1,i2,value");
    assert_eq!(lines.len(), 1 + 9);
    assert!(lines[1].starts_with("1,1,"));
    assert!(lines[9].starts_with("3,3,"));
}

#[test]
fn gen_seed_flag_changes_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("field_ma.json");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    run(&["gen", "--config", path(&cfg), "--out", path(&a), "--seed", "5"]);
    run(&["gen", "--config", path(&cfg), "--out", path(&b), "--seed", "6"]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn check_reports_hold_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = configs().join("cairoli_moment.json");
    let o = run(&[
        "check", "--theorem", "cairoli_moment", "--config", path(&cfg), "--seed", "4", "--replicates", "2000", "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let text = report.to_string();
    assert!(text.contains("\"HOLD\""), "{text}");
    assert!(!text.contains("\"VIOLATION\""));
}

#[test]
fn check_rejects_unknown_or_mismatched_theorem() {
    let cfg = configs().join("cairoli_moment.json");
    let o = run(&["check", "--theorem", "no_such_bound", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["check", "--theorem", "doob_indicator", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cairoli_moment"));
}

#[test]
fn upcross_reproduces_the_two_by_two_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.json");
    let o = run(&["upcross", "--config", path(&configs().join("remark_upcross.json")), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["per_direction"], serde_json::json!([0, 1]));
    assert_eq!(v["total"], 1);
}

#[test]
fn suite_exit_codes_follow_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [("smoke.json", 0), ("negative_control.json", 1), ("gates.json", 2)];
    for (name, want) in cases {
        let out = dir.path().join(name);
        let o = run(&["suite", "--config", path(&configs().join(name)), "--out", path(&out)]);
        assert_eq!(o.status.code(), Some(want), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join("suite.json").is_file());
        assert!(out.join("suite.csv").is_file());
    }
}

#[test]
fn missing_config_is_an_error() {
    let o = run(&["upcross", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_worker_count_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_demifield"))
        .args(["suite", "--config", path(&configs().join("smoke.json")), "--out", path(dir.path())])
        .env("DEMIFIELD_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
