use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::EvalError;
use crate::env::{reset_env, Env};
use crate::grid::{Action, GridState, Outcome};
use crate::obs::ObsMode;
use crate::oracle::{oracle_act, random_act, OracleState};
use crate::rng::StreamRng;
use crate::tasks::{Difficulty, RewardMode, TaskId};

/// The agent raised or timed out; the rest of the episode is played with noops.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("agent fault: {0}")]
pub struct AgentFault(pub String);

/// One agent choice plus bookkeeping the episode log keeps alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: Action,
    /// The agent's raw output could not be parsed and the action fell back to noop.
    pub parse_failure: bool,
    /// Free-form trace (prompt/response pairs and the like).
    pub trace: Option<serde_json::Value>,
}

impl From<Action> for Decision {
    fn from(action: Action) -> Self {
        Decision { action, parse_failure: false, trace: None }
    }
}

pub trait Policy {
    fn act(&mut self, env: &Env, mode: ObsMode) -> Result<Decision, AgentFault>;
}

#[derive(Debug, Default)]
pub struct OraclePolicy {
    memory: OracleState,
}

impl OraclePolicy {
    pub fn new() -> Self {
        OraclePolicy::default()
    }
}

impl Policy for OraclePolicy {
    fn act(&mut self, env: &Env, _mode: ObsMode) -> Result<Decision, AgentFault> {
        Ok(oracle_act(env.state(), &mut self.memory).into())
    }
}

#[derive(Debug, Clone)]
pub struct RandomPolicy {
    rng: StreamRng,
}

impl RandomPolicy {
    pub fn new(stream_seed: u64) -> Self {
        RandomPolicy { rng: StreamRng::new(stream_seed) }
    }
}

impl Policy for RandomPolicy {
    fn act(&mut self, _env: &Env, _mode: ObsMode) -> Result<Decision, AgentFault> {
        Ok(random_act(&mut self.rng).into())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoopPolicy;

impl Policy for NoopPolicy {
    fn act(&mut self, _env: &Env, _mode: ObsMode) -> Result<Decision, AgentFault> {
        Ok(Action::Noop.into())
    }
}

/// Plays a fixed action list, then noops.
#[derive(Debug, Clone)]
pub struct ScriptedPolicy {
    actions: Vec<Action>,
    cursor: usize,
}

impl ScriptedPolicy {
    pub fn new(actions: Vec<Action>) -> Self {
        ScriptedPolicy { actions, cursor: 0 }
    }
}

impl Policy for ScriptedPolicy {
    fn act(&mut self, _env: &Env, _mode: ObsMode) -> Result<Decision, AgentFault> {
        let a = self.actions.get(self.cursor).copied().unwrap_or(Action::Noop);
        self.cursor += 1;
        Ok(a.into())
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u32,
    /// Observation the agent acted on.
    pub obs_ascii: String,
    pub obs_language: String,
    pub action: Action,
    pub reward: f64,
    pub done: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub parse_failure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub seed: u64,
    pub steps: Vec<StepRecord>,
    pub total_reward: f64,
    pub success: bool,
    #[serde(default)]
    pub reward_mode: RewardMode,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<String>,
}

impl EpisodeRecord {
    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.reward).collect()
    }

    pub fn actions(&self) -> Vec<Action> {
        self.steps.iter().map(|s| s.action).collect()
    }

    pub fn parse_failures(&self) -> usize {
        self.steps.iter().filter(|s| s.parse_failure).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeOptions {
    pub obs_mode: ObsMode,
    pub reward_mode: RewardMode,
    /// Render the ascii and language observation of every step into the log.
    pub log_observations: bool,
}

impl Default for EpisodeOptions {
    fn default() -> Self {
        EpisodeOptions { obs_mode: ObsMode::Ascii, reward_mode: RewardMode::Sparse, log_observations: true }
    }
}

/// Reset `(task, difficulty, seed)` and let `agent` play until a terminal outcome.
pub fn run_episode(
    agent: &mut dyn Policy,
    task: TaskId,
    difficulty: Difficulty,
    seed: u64,
    options: EpisodeOptions,
) -> Result<EpisodeRecord, EvalError> {
    run_episode_from(agent, reset_env(task, difficulty, seed)?, options)
}

/// Play from an already generated initial state.
pub fn run_episode_from(
    agent: &mut dyn Policy,
    start: GridState,
    options: EpisodeOptions,
) -> Result<EpisodeRecord, EvalError> {
    let (task, difficulty, seed) = (start.task, start.difficulty, start.seed);
    let mut env = Env::from_state(start).with_reward_mode(options.reward_mode);
    let mut steps = Vec::with_capacity(env.state().max_steps as usize);
    let mut fault: Option<String> = None;
    while !env.is_done() {
        let (obs_ascii, obs_language) = if options.log_observations {
            let b = env.bundle(false);
            (b.ascii, b.language)
        } else {
            (String::new(), String::new())
        };
        let decision = if fault.is_some() {
            Decision::from(Action::Noop)
        } else {
            match agent.act(&env, options.obs_mode) {
                Ok(d) => d,
                Err(AgentFault(msg)) => {
                    log::warn!("{task}/{difficulty} seed {seed}: {msg}; continuing with noops");
                    fault = Some(msg);
                    Decision::from(Action::Noop)
                }
            }
        };
        let t = env.state().step_count;
        let result = env.act(decision.action)?;
        steps.push(StepRecord {
            t,
            obs_ascii,
            obs_language,
            action: decision.action,
            reward: result.reward,
            done: result.outcome.is_terminal(),
            parse_failure: decision.parse_failure,
            trace: decision.trace,
        });
    }
    let state = env.state();
    Ok(EpisodeRecord {
        task,
        difficulty,
        seed,
        steps,
        total_reward: state.cumulative_reward,
        success: state.outcome == Outcome::Success,
        reward_mode: options.reward_mode,
        outcome: state.outcome,
        fault,
    })
}

/// Re-execute a recorded episode and check every reward, done flag and logged
/// ascii observation against a fresh run.
pub fn replay_episode(record: &EpisodeRecord) -> Result<(), EvalError> {
    let mut env = Env::new(record.task, record.difficulty, record.seed)?.with_reward_mode(record.reward_mode);
    for (i, step) in record.steps.iter().enumerate() {
        let mismatch = |detail: String| EvalError::ReplayMismatch { step: i, detail };
        if env.is_done() {
            return Err(mismatch("episode ended before the recorded steps ran out".into()));
        }
        if step.t != env.state().step_count {
            return Err(mismatch(format!("recorded t={} but engine is at {}", step.t, env.state().step_count)));
        }
        if !step.obs_ascii.is_empty() {
            let ascii = env.bundle(false).ascii;
            if ascii != step.obs_ascii {
                return Err(mismatch("ascii observation differs".into()));
            }
        }
        let result = env.act(step.action)?;
        if result.reward.to_bits() != step.reward.to_bits() {
            return Err(mismatch(format!("reward {} != recorded {}", result.reward, step.reward)));
        }
        if result.outcome.is_terminal() != step.done {
            return Err(mismatch(format!("done {} != recorded {}", result.outcome.is_terminal(), step.done)));
        }
    }
    if !env.is_done() {
        return Err(EvalError::ReplayMismatch {
            step: record.steps.len(),
            detail: "recorded episode stops before a terminal state".into(),
        });
    }
    let state = env.state();
    if state.cumulative_reward.to_bits() != record.total_reward.to_bits() || state.outcome != record.outcome {
        return Err(EvalError::ReplayMismatch {
            step: record.steps.len(),
            detail: format!(
                "final return {} ({}) != recorded {} ({})",
                state.cumulative_reward,
                state.outcome.name(),
                record.total_reward,
                record.outcome.name()
            ),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Flaky(usize);

    impl Policy for Flaky {
        fn act(&mut self, _env: &Env, _mode: ObsMode) -> Result<Decision, AgentFault> {
            if self.0 == 0 {
                return Err(AgentFault("backend timed out".into()));
            }
            self.0 -= 1;
            Ok(Action::MoveUp.into())
        }
    }

    #[test]
    fn fault_is_flagged_and_padded_with_noops() {
        let rec = run_episode(&mut Flaky(3), TaskId::GoToGoal, Difficulty::Medium, 5, EpisodeOptions::default())
            .unwrap();
        assert_eq!(rec.fault.as_deref(), Some("backend timed out"));
        assert!(rec.steps[3..].iter().all(|s| s.action == Action::Noop || rec.success));
        assert!(rec.steps.last().unwrap().done);
    }

    #[test]
    fn replay_rejects_tampered_reward() {
        let mut rec =
            run_episode(&mut OraclePolicy::new(), TaskId::GoToGoal, Difficulty::Easy, 3, EpisodeOptions::default())
                .unwrap();
        replay_episode(&rec).unwrap();
        rec.steps.last_mut().unwrap().reward = 0.5;
        assert!(matches!(replay_episode(&rec), Err(EvalError::ReplayMismatch { .. })));
    }
}
