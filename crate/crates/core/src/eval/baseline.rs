use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::score::mean;
use super::seeds::{derive_seed, derive_seeds, SeedPool, EVAL_SEEDS};
use super::{write_atomic, EvalError, ENGINE_VERSION};
use crate::env::reset_env;
use crate::grid::{step_env, GridState};
use crate::oracle::{random_act, run_oracle};
use crate::rng::StreamRng;
use crate::tasks::{Difficulty, RewardMode, TaskId};

/// Random-policy rollouts per eval seed.
pub const BASELINE_REPS: usize = 20;

/// Normalization constants for one (task, difficulty, reward mode).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub reward_mode: RewardMode,
    pub engine_version: String,
    pub random_baseline: f64,
    pub oracle_return: f64,
    /// Seed-major: all repetitions of eval seed 0 first.
    pub random_returns: Vec<f64>,
    pub oracle_returns: Vec<f64>,
}

/// Random-policy stream for repetition `repetition` on eval seed `seed_index`.
pub fn calibration_stream(task: TaskId, difficulty: Difficulty, seed_index: usize, repetition: usize) -> u64 {
    derive_seed(task, difficulty, SeedPool::RandomCal, seed_index * BASELINE_REPS + repetition)
}

/// `(episode seed, policy stream seed)` for every calibration rollout, seed-major.
pub fn calibration_streams(task: TaskId, difficulty: Difficulty) -> Vec<(u64, u64)> {
    let eval = derive_seeds(task, difficulty, SeedPool::Eval, EVAL_SEEDS);
    eval.iter()
        .enumerate()
        .flat_map(|(i, &seed)| (0..BASELINE_REPS).map(move |r| (seed, calibration_stream(task, difficulty, i, r))))
        .collect()
}

fn random_return(start: &GridState, stream: u64) -> Result<f64, EvalError> {
    let mut state = start.clone();
    let mut rng = StreamRng::new(stream);
    while !state.outcome.is_terminal() {
        step_env(&mut state, random_act(&mut rng))?;
    }
    Ok(state.cumulative_reward)
}

/// Compute a calibration from scratch, bypassing any cache.
pub fn run_calibration(task: TaskId, difficulty: Difficulty, mode: RewardMode) -> Result<Calibration, EvalError> {
    let starts = derive_seeds(task, difficulty, SeedPool::Eval, EVAL_SEEDS)
        .into_iter()
        .map(|seed| {
            let mut start = reset_env(task, difficulty, seed)?;
            start.reward_mode = mode;
            Ok(start)
        })
        .collect::<Result<Vec<GridState>, EvalError>>()?;
    let mut random_returns = Vec::with_capacity(EVAL_SEEDS * BASELINE_REPS);
    for (i, start) in starts.iter().enumerate() {
        for r in 0..BASELINE_REPS {
            random_returns.push(random_return(start, calibration_stream(task, difficulty, i, r))?);
        }
    }
    let oracle_returns: Vec<f64> = starts.iter().map(|s| run_oracle(s).cumulative_reward).collect();
    Ok(Calibration {
        task,
        difficulty,
        reward_mode: mode,
        engine_version: ENGINE_VERSION.to_string(),
        random_baseline: mean(&random_returns),
        oracle_return: mean(&oracle_returns),
        random_returns,
        oracle_returns,
    })
}

fn cache_path(dir: &Path, task: TaskId, difficulty: Difficulty, mode: RewardMode) -> PathBuf {
    let engine: String = ENGINE_VERSION.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' }).collect();
    let mode = match mode {
        RewardMode::Sparse => "sparse",
        RewardMode::Dense => "dense",
    };
    dir.join(format!("baseline-{}-{}-{mode}-{engine}.json", task.name(), difficulty.name()))
}

/// Random baseline and oracle return for a pair, read from or written to `cache_dir`.
pub fn calibrate_baseline(
    task: TaskId,
    difficulty: Difficulty,
    mode: RewardMode,
    cache_dir: Option<&Path>,
) -> Result<Calibration, EvalError> {
    let Some(dir) = cache_dir else {
        return run_calibration(task, difficulty, mode);
    };
    let path = cache_path(dir, task, difficulty, mode);
    if let Ok(text) = std::fs::read_to_string(&path) {
        match serde_json::from_str::<Calibration>(&text) {
            Ok(c) if c.engine_version == ENGINE_VERSION && c.task == task && c.difficulty == difficulty && c.reward_mode == mode => {
                return Ok(c)
            }
            Ok(_) => log::warn!("{} does not match the requested pair; recalibrating", path.display()),
            Err(e) => log::warn!("ignoring unreadable baseline cache {}: {e}", path.display()),
        }
    }
    let fresh = run_calibration(task, difficulty, mode)?;
    let text = serde_json::to_string(&fresh).expect("calibration serializes");
    write_atomic(&path, text.as_bytes())?;
    Ok(fresh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_cover_every_repetition() {
        let s = calibration_streams(TaskId::LightsOut, Difficulty::Hard);
        assert_eq!(s.len(), EVAL_SEEDS * BASELINE_REPS);
        assert!(s[..BASELINE_REPS].iter().all(|(seed, _)| *seed == s[0].0));
        let unique: std::collections::HashSet<u64> = s.iter().map(|p| p.1).collect();
        assert_eq!(unique.len(), s.len());
    }

    #[test]
    fn cache_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let a = calibrate_baseline(TaskId::GoToGoal, Difficulty::Easy, RewardMode::Sparse, Some(dir.path())).unwrap();
        let b = calibrate_baseline(TaskId::GoToGoal, Difficulty::Easy, RewardMode::Sparse, Some(dir.path())).unwrap();
        assert_eq!(a, b);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!((0.0..=1.0).contains(&a.random_baseline));
        assert_eq!(a.oracle_return, 1.0);
    }
}
