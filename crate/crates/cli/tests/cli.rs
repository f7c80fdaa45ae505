//! End-to-end checks of the binary: artifact writing, exit codes, and the
//! help transcript.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lagrange-swarm"))
}

fn capture(cmd: &mut Command) -> (i32, String, String) {
    let out = cmd.output().expect("binary should run");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn benchmark_scenario() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/scenario_paper_sec5.json")
}

fn benchmark_value() -> serde_json::Value {
    let text = std::fs::read_to_string(benchmark_scenario()).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn help_matches_the_golden_transcript() {
    let mut transcript = String::new();
    let (code, stdout, _) = capture(bin().arg("--help"));
    assert_eq!(code, 0);
    transcript.push_str(&stdout);
    for sub in ["run", "verify", "analyze-graph", "synth-im", "report"] {
        transcript.push_str(&format!("================ {sub} ================\n"));
        let (code, stdout, _) = capture(bin().args([sub, "--help"]));
        assert_eq!(code, 0, "{sub} --help failed");
        transcript.push_str(&stdout);
    }
    assert_eq!(transcript, include_str!("golden_help.txt"));
}

#[test]
fn run_writes_the_three_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = capture(bin().args([
        "run",
        benchmark_scenario().to_str().unwrap(),
        "-o",
        dir.path().to_str().unwrap(),
        "--override",
        "integrator.t_end=1.0",
        "--threads",
        "2",
    ]));
    assert_eq!(code, 0, "stderr: {stderr}");

    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,"), "unexpected CSV header");
    assert!(trace.lines().count() > 10);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["completed"], serde_json::Value::Bool(true));
    assert_eq!(summary["agents"], serde_json::json!(5));

    let plots = std::fs::read_to_string(dir.path().join("plots.gp")).unwrap();
    assert!(plots.contains("set datafile separator"));
    assert!(plots.contains("trace.csv"));
}

#[test]
fn a_missing_scenario_names_the_path() {
    let (code, _, stderr) = capture(bin().args(["run", "/nowhere/missing.json"]));
    assert_eq!(code, 1);
    assert!(stderr.contains("missing.json"), "stderr: {stderr}");
}

#[test]
fn a_zero_step_override_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = capture(bin().args([
        "run",
        benchmark_scenario().to_str().unwrap(),
        "-o",
        dir.path().to_str().unwrap(),
        "--override",
        "integrator.dt=0",
    ]));
    assert_eq!(code, 1);
    assert!(stderr.contains("dt"), "stderr: {stderr}");
}

#[test]
fn an_unknown_suite_is_a_usage_error() {
    let (code, _, stderr) = capture(bin().args(["verify", "bogus"]));
    assert_eq!(code, 1);
    assert!(stderr.contains("bogus"), "stderr: {stderr}");
}

#[test]
fn the_plant_suite_passes() {
    let (code, stdout, _) = capture(bin().args(["verify", "plant"]));
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("[PASS] plant.skew_symmetry"));
    assert!(stdout.contains("all checks passed"));
}

#[test]
fn a_disconnected_graph_exits_structurally() {
    let mut value = benchmark_value();
    value["graph"] = serde_json::json!({ "edges": [[1, 2, 1.0]] });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("disconnected.json");
    std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();

    let (code, stdout, _) = capture(bin().args(["analyze-graph", path.to_str().unwrap()]));
    assert_eq!(code, 3);
    assert!(stdout.contains("directed spanning tree: NO"), "stdout: {stdout}");
}

#[test]
fn a_single_agent_is_its_own_fleet() {
    let mut value = benchmark_value();
    value["graph"] = serde_json::json!({ "edges": [] });
    let agents = value["agents"].as_array().unwrap();
    value["agents"] = serde_json::Value::Array(vec![agents[0].clone()]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("single.json");
    std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();

    let (code, stdout, _) = capture(bin().args(["analyze-graph", path.to_str().unwrap()]));
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("left null vector u: [1.000000]"), "stdout: {stdout}");
    // A lone agent's emergent generator is its own seed.
    assert!(stdout.contains("3.000000"), "stdout: {stdout}");
}

#[test]
fn synthesis_prints_the_frequency_row() {
    let (code, stdout, _) = capture(bin().args(["synth-im", "0.5"]));
    assert_eq!(code, 0);
    // B♦ = [3 − σ², 2] at σ = 0.5, and ϱ = σ².
    assert!(stdout.contains("2.750000"), "stdout: {stdout}");
    assert!(stdout.contains("ϱ: [0.250000]"), "stdout: {stdout}");
}

#[test]
fn report_runs_end_to_end() {
    let (code, stdout, _) = capture(bin().args([
        "report",
        benchmark_scenario().to_str().unwrap(),
        "--override",
        "integrator.t_end=1.0",
    ]));
    assert_eq!(code, 0);
    assert!(stdout.contains("integration completed"), "stdout: {stdout}");
    assert!(stdout.contains("5 agents"), "stdout: {stdout}");
}
