use std::path::PathBuf;

use rayon::prelude::*;

use super::baseline::{calibrate_baseline, Calibration};
use super::episode::{run_episode_from, EpisodeOptions, EpisodeRecord, Policy};
use super::score::{mean, score_pair, ScoreRecord};
use super::seeds::{derive_seeds, SeedPool, EVAL_SEEDS};
use super::EvalError;
use crate::env::reset_env;
use crate::grid::GridState;
use crate::oracle::run_oracle;
use crate::tasks::{Difficulty, TaskId};

/// Where one episode sits in a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeSlot {
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub seed_index: usize,
    pub repetition: usize,
    pub seed: u64,
}

/// Builds a fresh agent for one episode.
pub type PolicyFactory<'a> = dyn Fn(&EpisodeSlot) -> Box<dyn Policy> + Sync + 'a;

#[derive(Debug, Clone)]
pub struct EvalPlan {
    pub pairs: Vec<(TaskId, Difficulty)>,
    pub seeds_per_pair: usize,
    /// Episodes per seed, each with its own agent.
    pub repetitions: usize,
    pub options: EpisodeOptions,
    pub workers: usize,
    pub cache_dir: Option<PathBuf>,
}

impl EvalPlan {
    /// Every task at every difficulty on the standard eval pool.
    pub fn full(options: EpisodeOptions) -> Self {
        EvalPlan {
            pairs: TaskId::ALL.iter().flat_map(|&t| Difficulty::ALL.map(|d| (t, d))).collect(),
            seeds_per_pair: EVAL_SEEDS,
            repetitions: 1,
            options,
            workers: default_workers(),
            cache_dir: None,
        }
    }
}

/// One fewer than the logical core count, at least one.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get().saturating_sub(1).max(1)).unwrap_or(1)
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub scores: Vec<ScoreRecord>,
    /// Pair-major, then seed, then repetition.
    pub episodes: Vec<EpisodeRecord>,
    pub calibrations: Vec<Calibration>,
}

/// Oracle mean over exactly the episodes the agent played, in the same order.
fn oracle_return_on(cal: &Calibration, episodes: &[EpisodeRecord], seeds: &[u64]) -> Result<f64, EvalError> {
    let mut per_seed: Vec<f64> = cal.oracle_returns.iter().copied().take(seeds.len()).collect();
    for &seed in &seeds[per_seed.len()..] {
        let mut start = reset_env(cal.task, cal.difficulty, seed)?;
        start.reward_mode = cal.reward_mode;
        per_seed.push(run_oracle(&start).cumulative_reward);
    }
    let returns: Vec<f64> = episodes
        .iter()
        .map(|e| per_seed[seeds.iter().position(|s| *s == e.seed).expect("episode seed is in the plan")])
        .collect();
    Ok(mean(&returns))
}

/// Play every (pair, eval seed) episode on a bounded worker pool and score each pair.
pub fn evaluate(plan: &EvalPlan, factory: &PolicyFactory<'_>) -> Result<Evaluation, EvalError> {
    if plan.pairs.is_empty() || plan.seeds_per_pair == 0 || plan.repetitions == 0 {
        return Err(EvalError::NoEpisodes);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers.max(1))
        .build()
        .map_err(|e| EvalError::Pool(e.to_string()))?;
    pool.install(|| {
        let calibrations = plan
            .pairs
            .par_iter()
            .map(|&(t, d)| calibrate_baseline(t, d, plan.options.reward_mode, plan.cache_dir.as_deref()))
            .collect::<Result<Vec<_>, _>>()?;
        let seeds: Vec<Vec<u64>> =
            plan.pairs.iter().map(|&(t, d)| derive_seeds(t, d, SeedPool::Eval, plan.seeds_per_pair)).collect();
        let starts: Vec<Vec<GridState>> = plan
            .pairs
            .par_iter()
            .zip(&seeds)
            .map(|(&(t, d), seeds)| seeds.iter().map(|&s| reset_env(t, d, s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let slots: Vec<EpisodeSlot> = plan
            .pairs
            .iter()
            .zip(&seeds)
            .flat_map(|(&(task, difficulty), seeds)| {
                seeds.iter().enumerate().flat_map(move |(seed_index, &seed)| {
                    (0..plan.repetitions).map(move |repetition| EpisodeSlot {
                        task,
                        difficulty,
                        seed_index,
                        repetition,
                        seed,
                    })
                })
            })
            .collect();
        let episodes = slots
            .par_iter()
            .map(|slot| {
                let mut agent = factory(slot);
                let p = plan.pairs.iter().position(|&pair| pair == (slot.task, slot.difficulty)).expect("slot pair");
                run_episode_from(agent.as_mut(), starts[p][slot.seed_index].clone(), plan.options)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut scores = Vec::with_capacity(plan.pairs.len());
        for (p, chunk) in episodes.chunks(plan.seeds_per_pair * plan.repetitions).enumerate() {
            let cal = &calibrations[p];
            let returns: Vec<f64> = chunk.iter().map(|e| e.total_reward).collect();
            let successes = chunk.iter().filter(|e| e.success).count();
            let oracle_return = oracle_return_on(cal, chunk, &seeds[p])?;
            scores.push(score_pair(&returns, successes, cal.random_baseline, oracle_return, cal.task, cal.difficulty));
        }
        Ok(Evaluation { scores, episodes, calibrations })
    })
}
