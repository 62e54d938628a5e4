use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use gridbench::eval::{
    build_report, calibration_stream, emit_report, evaluate, AgentFault, BenchmarkReport, Decision, EpisodeOptions,
    EpisodeSlot, EvalError, EvalPlan, OraclePolicy, Policy, RandomPolicy, ReportMetadata, BASELINE_REPS,
    ENGINE_VERSION,
};
use gridbench::{Action, Env, ObsMode};
use gridbench_harness::{BackendKind, ChatBackend, HarnessAgent, HarnessConfig, HttpChatBackend, Preset, ScriptedBackend};

use crate::config::{AgentSpec, ConfigError, ResolvedExperiment};

pub const REPORT_FILE: &str = "report.json";
pub const EPISODES_FILE: &str = "episodes.ndjson";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("chat backend unavailable: {0}")]
    Backend(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub report: BenchmarkReport,
    pub report_path: PathBuf,
    pub episodes_path: PathBuf,
    pub episodes: usize,
    pub faulted_episodes: usize,
}

/// A harness agent whose scripted backend answers with the oracle's move, so
/// the full prompt and parse path runs without a network.
struct OracleScriptedHarness {
    oracle: OraclePolicy,
    next: Arc<Mutex<Action>>,
    agent: HarnessAgent,
}

impl OracleScriptedHarness {
    fn new(config: HarnessConfig) -> Self {
        let next = Arc::new(Mutex::new(Action::Noop));
        let preset = config.preset;
        let shared = next.clone();
        let backend = ScriptedBackend::callback(move |_| {
            let code = shared.lock().unwrap_or_else(|p| p.into_inner()).code();
            match preset {
                Preset::Markovian => code.to_string(),
                Preset::MarkovianReasoner => format!("Following the shortest known route.\nACTION: {code}"),
            }
        });
        OracleScriptedHarness { oracle: OraclePolicy::new(), next, agent: HarnessAgent::new(config, Arc::new(backend)) }
    }
}

impl Policy for OracleScriptedHarness {
    fn act(&mut self, env: &Env, mode: ObsMode) -> Result<Decision, AgentFault> {
        let planned = self.oracle.act(env, mode)?.action;
        *self.next.lock().unwrap_or_else(|p| p.into_inner()) = planned;
        self.agent.act(env, mode)
    }
}

fn metadata(exp: &ResolvedExperiment) -> ReportMetadata {
    let c = &exp.config;
    let (preset, family) = match &c.agent {
        AgentSpec::Harness(h) => (Some(h.preset.name().to_string()), Some(h.model_name.clone()).filter(|m| !m.is_empty())),
        _ => (None, None),
    };
    ReportMetadata {
        agent: c.agent.label(),
        harness_preset: preset,
        obs_mode: c.obs_mode.name().to_string(),
        model_family: family,
        parameter_count: None,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        engine_version: ENGINE_VERSION.to_string(),
        reward_mode: c.reward_mode,
        seeds_per_pair: c.seeds,
    }
}

/// Play every configured episode, then write `report.json` and `episodes.ndjson` under the output directory.
pub fn run_experiment(exp: &ResolvedExperiment) -> Result<RunSummary, RunError> {
    let c = &exp.config;
    let pairs = exp.tasks.iter().flat_map(|&t| exp.difficulties.iter().map(move |&d| (t, d))).collect();
    let plan = EvalPlan {
        pairs,
        seeds_per_pair: c.seeds,
        repetitions: if c.agent == AgentSpec::Random { BASELINE_REPS } else { 1 },
        options: EpisodeOptions { obs_mode: c.obs_mode, reward_mode: c.reward_mode, log_observations: c.log_observations },
        workers: c.workers.unwrap_or_else(gridbench::eval::default_workers),
        cache_dir: Some(c.cache_dir()),
    };
    let evaluation = match &c.agent {
        AgentSpec::Oracle => evaluate(&plan, &|_: &EpisodeSlot| Box::new(OraclePolicy::new()) as Box<dyn Policy>)?,
        AgentSpec::Random => evaluate(&plan, &|s: &EpisodeSlot| {
            Box::new(RandomPolicy::new(calibration_stream(s.task, s.difficulty, s.seed_index, s.repetition)))
                as Box<dyn Policy>
        })?,
        AgentSpec::Harness(h) => {
            let mut config = h.clone();
            config.obs_mode = c.obs_mode;
            match config.backend {
                BackendKind::Scripted => evaluate(&plan, &|_: &EpisodeSlot| {
                    Box::new(OracleScriptedHarness::new(config.clone())) as Box<dyn Policy>
                })?,
                BackendKind::HttpChat => {
                    let backend: Arc<dyn ChatBackend> = Arc::new(
                        HttpChatBackend::from_env(&config.model_name).map_err(|e| RunError::Backend(e.to_string()))?,
                    );
                    evaluate(&plan, &|_: &EpisodeSlot| {
                        Box::new(HarnessAgent::new(config.clone(), backend.clone())) as Box<dyn Policy>
                    })?
                }
            }
        }
    };
    let io = |path: &PathBuf| {
        let path = path.clone();
        move |source| RunError::Io { path, source }
    };
    std::fs::create_dir_all(&c.output_dir).map_err(io(&c.output_dir))?;
    let episodes_path = c.output_dir.join(EPISODES_FILE);
    let mut log = std::io::BufWriter::new(std::fs::File::create(&episodes_path).map_err(io(&episodes_path))?);
    for e in &evaluation.episodes {
        serde_json::to_writer(&mut log, e).expect("episode serializes");
        log.write_all(b"\n").map_err(io(&episodes_path))?;
    }
    log.flush().map_err(io(&episodes_path))?;
    let faulted_episodes = evaluation.episodes.iter().filter(|e| e.fault.is_some()).count();
    if faulted_episodes > 0 {
        log::warn!("{faulted_episodes} episode(s) faulted and were padded with noops");
    }
    let report = build_report(evaluation.scores, metadata(exp))?;
    let report_path = c.output_dir.join(REPORT_FILE);
    emit_report(&report, &report_path)?;
    Ok(RunSummary { report, report_path, episodes_path, episodes: evaluation.episodes.len(), faulted_episodes })
}
