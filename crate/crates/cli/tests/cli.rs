use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relooper"))
}

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(rel)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_prints_plan() {
    let o = bin().arg("solve").arg(data("scenarios/task12_tomato.json")).output().unwrap();
    assert!(o.status.success());
    let plan = stdout(&o);
    assert_eq!(plan.lines().count(), 7);
    assert_eq!(plan.lines().last(), Some("put tomato 1 in/on microwave 1"));
}

#[test]
fn solve_reports_depth_limit() {
    let o = bin()
        .args(["solve", "--max-depth", "2"])
        .arg(data("scenarios/task12_tomato.json"))
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no plan"));
}

#[test]
fn run_then_report_round_trips() {
    let out = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["run", "--config"])
        .arg(data("suites/oracle_six.json"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = stdout(&o);
    assert!(table.lines().nth(1).unwrap().split_whitespace().eq(["100", "6", "6"]));
    assert!(out.path().join("trajectory.jsonl").is_file());

    let r = bin().arg("report").arg(out.path()).args(["--format", "table"]).output().unwrap();
    assert!(r.status.success());
    assert_eq!(stdout(&r), table);

    let csv = bin().arg("report").arg(out.path()).args(["--format", "csv"]).output().unwrap();
    assert!(stdout(&csv).lines().last().unwrap().starts_with("suite,,,,,,100,6,6,"));
}

#[test]
fn backend_override_changes_results() {
    let out = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["run", "--backend", "oracle", "--config"])
        .arg(data("suites/personas.json"))
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().nth(1).unwrap().split_whitespace().eq(["100", "2", "2"]));
}

#[test]
fn missing_config_fails() {
    let o = bin().args(["run", "--config", "/nonexistent/suite.json"]).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn bad_backend_spec_is_rejected() {
    let o = bin()
        .args(["run", "--backend", "telepathy", "--config"])
        .arg(data("suites/oracle_six.json"))
        .output()
        .unwrap();
    assert!(!o.status.success());
}

#[test]
fn play_accepts_actions_and_completes() {
    let plan = bin().arg("solve").arg(data("scenarios/task12_tomato.json")).output().unwrap();
    let mut child = bin()
        .arg("play")
        .arg(data("scenarios/task12_tomato.json"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = b"think: where is it\n".to_vec();
    input.extend_from_slice(&plan.stdout);
    child.stdin.take().unwrap().write_all(&input).unwrap();
    let o = child.wait_with_output().unwrap();
    let text = stdout(&o);
    assert!(text.contains("Nothing happens."));
    assert!(text.trim_end().ends_with("Task complete."));
}
