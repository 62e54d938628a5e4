use std::path::Path;
use std::process::{Command, Output};

use gridbench::eval::{load_report, EpisodeRecord};

fn gridbench(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridbench"))
        .args(args)
        .current_dir(dir)
        .env_remove("GRIDBENCH_CHAT_URL")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn without_timestamp(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn oracle_run_scores_one_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "oracle.yaml",
        "agent: oracle\ntasks: [GoToGoal, SokobanPush, SequenceMemory]\ndifficulties: [easy, hard]\nseeds: 4\nbaseline_cache: cache\n",
    );
    let a = gridbench(&["run", "--config", &cfg, "--out", "a"], dir.path());
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = gridbench(&["run", "--config", &cfg, "--out", "b", "--workers", "1"], dir.path());
    assert!(b.status.success());
    let report = load_report(&dir.path().join("a/report.json")).unwrap();
    assert!(report.records.iter().all(|r| r.ons == Some(1.0)));
    assert_eq!(report.records.len(), 6);
    assert!(report.overall.is_none(), "three categories are missing");
    assert_eq!(without_timestamp(&dir.path().join("a/report.json")), without_timestamp(&dir.path().join("b/report.json")));
    assert_eq!(
        std::fs::read(dir.path().join("a/episodes.ndjson")).unwrap(),
        std::fs::read(dir.path().join("b/episodes.ndjson")).unwrap()
    );
    let replay = gridbench(&["replay", "a/episodes.ndjson"], dir.path());
    assert!(replay.status.success());
    assert!(stdout(&replay).contains("24 of 24"));
}

#[test]
fn random_agent_interval_contains_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "random.yaml",
        "agent: random\ntasks: [MazeNavigation, LightsOut]\ndifficulties: [easy]\noutput_dir: out\n",
    );
    let o = gridbench(&["run", "--config", &cfg], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = load_report(&dir.path().join("out/report.json")).unwrap();
    for r in report.records.iter().filter(|r| !r.degenerate) {
        assert_eq!(r.n_episodes, 500);
        let (lo, hi) = (r.ci_low.unwrap(), r.ci_high.unwrap());
        assert!(lo <= 1e-12 && hi >= -1e-12, "{}/{}: [{lo}, {hi}]", r.task, r.difficulty);
    }
}

#[test]
fn scripted_harness_replays_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "harness.yaml",
        "agent:\n  harness:\n    preset: markovian_reasoner\n    backend: scripted\n    model_name: offline\n\
         tasks: [KeyDoorPuzzle, GraphColoring]\ndifficulties: [medium]\nseeds: 3\nobs_mode: language\noutput_dir: out\n",
    );
    let o = gridbench(&["run", "--config", &cfg], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = load_report(&dir.path().join("out/report.json")).unwrap();
    assert_eq!(report.metadata.agent, "harness:offline");
    assert_eq!(report.metadata.harness_preset.as_deref(), Some("markovian_reasoner"));
    assert!(report.records.iter().all(|r| r.ons == Some(1.0)));
    let first = std::fs::read_to_string(dir.path().join("out/episodes.ndjson")).unwrap();
    let rec: EpisodeRecord = serde_json::from_str(first.lines().next().unwrap()).unwrap();
    let trace = rec.steps[0].trace.as_ref().expect("chat exchange logged");
    assert!(trace.to_string().contains("ACTION:"));
}

#[test]
fn unreachable_backend_gives_partial_failure_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "down.yaml",
        "agent:\n  harness:\n    preset: markovian\ntasks: GoToGoal\ndifficulties: easy\nseeds: 1\noutput_dir: out\n",
    );
    let o = Command::new(env!("CARGO_BIN_EXE_gridbench"))
        .args(["run", "--config", &cfg])
        .current_dir(dir.path())
        .env("GRIDBENCH_CHAT_URL", "http://127.0.0.1:9/v1/chat/completions")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("out/report.json").exists());
}

#[test]
fn invalid_config_reports_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.yaml", "agent: oracle\ndifficulties: [easy, nightmare]\n");
    let o = gridbench(&["run", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`difficulties`"));
}

#[test]
fn utility_subcommands_work() {
    let dir = tempfile::tempdir().unwrap();
    let check = gridbench(&["oracle-check", "--tasks", "GoToGoal,Herding", "--difficulties", "easy", "--seeds", "3"], dir.path());
    assert!(check.status.success());
    assert_eq!(stdout(&check).lines().count(), 3);
    let tasks = gridbench(&["tasks"], dir.path());
    assert_eq!(stdout(&tasks).lines().count(), 12);
    let json = gridbench(&["tasks", "--json"], dir.path());
    let catalog: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(catalog.as_array().unwrap().len(), 12);
    let ds = gridbench(&["dataset", "--episodes", "8", "--tasks", "LightsOut", "--out", "ds"], dir.path());
    assert!(ds.status.success());
    assert!(stdout(&ds).contains("8 episodes"));
    let replay = gridbench(&["replay", "ds/episodes.ndjson"], dir.path());
    assert!(stdout(&replay).contains("8 of 8"));
}

#[test]
fn tampered_records_fail_replay() {
    let dir = tempfile::tempdir().unwrap();
    let ds = gridbench(&["dataset", "--episodes", "2", "--tasks", "GoToGoal", "--difficulties", "easy", "--out", "ds"], dir.path());
    assert!(ds.status.success());
    let text = std::fs::read_to_string(dir.path().join("ds/episodes.ndjson")).unwrap();
    let mut rec: EpisodeRecord = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    rec.steps.last_mut().unwrap().reward = 0.5;
    std::fs::write(dir.path().join("bad.json"), serde_json::to_string(&rec).unwrap()).unwrap();
    let o = gridbench(&["replay", "bad.json"], dir.path());
    assert!(!o.status.success());
    assert!(stdout(&o).contains("0 of 1"));
}
