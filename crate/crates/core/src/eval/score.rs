use serde::{Deserialize, Serialize};

use crate::rng::{hash2, StreamRng};
use crate::tasks::{Difficulty, TaskId};

/// Denominators smaller than this mark the pair degenerate.
pub const DEGENERACY_EPSILON: f64 = 1e-9;
pub const BOOTSTRAP_RESAMPLES: usize = 10_000;

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Oracle-normalized score; `None` when oracle and random are indistinguishable.
pub fn compute_ons(agent_return: f64, random_baseline: f64, oracle_return: f64) -> Option<f64> {
    let span = oracle_return - random_baseline;
    (span.abs() >= DEGENERACY_EPSILON).then(|| (agent_return - random_baseline) / span)
}

/// Percentile bootstrap interval of the mean.
///
/// ```
/// let (lo, hi) = gridbench::eval::bootstrap_ci(&[0.0, 1.0, 1.0, 0.0, 1.0], 0.95, 2000, 7);
/// assert!(lo <= 0.6 && 0.6 <= hi);
/// assert_eq!(gridbench::eval::bootstrap_ci(&[0.25; 8], 0.95, 100, 1), (0.25, 0.25));
/// ```
pub fn bootstrap_ci(values: &[f64], level: f64, resamples: usize, stream_seed: u64) -> (f64, f64) {
    assert!(!values.is_empty(), "bootstrap over an empty sample");
    if values.iter().all(|v| *v == values[0]) {
        return (values[0], values[0]);
    }
    let mut rng = StreamRng::new(stream_seed);
    let n = values.len();
    let mut means: Vec<f64> = (0..resamples.max(1))
        .map(|_| (0..n).map(|_| values[rng.index(n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    (percentile(&means, tail), percentile(&means, 1.0 - tail))
}

/// Linear interpolation between closest ranks of a sorted slice.
pub(crate) fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub agent_return: f64,
    pub random_baseline: f64,
    pub oracle_return: f64,
    pub ons: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub n_episodes: usize,
    pub degenerate: bool,
    pub success_rate: f64,
    /// Per-episode returns, kept so intervals can be recomputed from the report alone.
    pub episode_returns: Vec<f64>,
}

impl ScoreRecord {
    /// Per-episode scores on the pair's normalization; empty when degenerate.
    pub fn episode_ons(&self) -> Vec<f64> {
        if self.degenerate {
            return Vec::new();
        }
        let span = self.oracle_return - self.random_baseline;
        self.episode_returns.iter().map(|r| (r - self.random_baseline) / span).collect()
    }
}

/// Bootstrap stream for a pair, independent of every seed pool.
pub(crate) fn pair_stream(task: TaskId, difficulty: Difficulty) -> u64 {
    hash2(hash2(0xB0_07_57_4A, task.code() as u64), difficulty.code() as u64)
}

/// Score one pair from the agent's per-episode returns and successes.
pub fn score_pair(
    returns: &[f64],
    successes: usize,
    random_baseline: f64,
    oracle_return: f64,
    task: TaskId,
    difficulty: Difficulty,
) -> ScoreRecord {
    let agent_return = mean(returns);
    let ons = compute_ons(agent_return, random_baseline, oracle_return);
    let mut record = ScoreRecord {
        task,
        difficulty,
        agent_return,
        random_baseline,
        oracle_return,
        ons,
        ci_low: None,
        ci_high: None,
        n_episodes: returns.len(),
        degenerate: ons.is_none(),
        success_rate: successes as f64 / returns.len() as f64,
        episode_returns: returns.to_vec(),
    };
    if !record.degenerate {
        let per_episode = record.episode_ons();
        let (lo, hi) =
            bootstrap_ci(&per_episode, 0.95, BOOTSTRAP_RESAMPLES, pair_stream(record.task, record.difficulty));
        record.ci_low = Some(lo);
        record.ci_high = Some(hi);
    } else {
        log::warn!(
            "{}/{}: oracle return {} equals random baseline {}; pair is degenerate",
            record.task,
            record.difficulty,
            record.oracle_return,
            record.random_baseline
        );
    }
    record
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ons_fixtures() {
        assert_eq!(compute_ons(0.5, 0.5, 1.0), Some(0.0));
        assert_eq!(compute_ons(1.0, 0.5, 1.0), Some(1.0));
        assert!((compute_ons(1.2, 0.5, 1.0).unwrap() - 1.4).abs() < 1e-12);
        assert_eq!(compute_ons(0.3, 0.7, 0.7 + 1e-10), None);
    }

    #[test]
    fn percentile_interpolates() {
        let s = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&s, 0.5), 2.0);
        assert_eq!(percentile(&s, 0.125), 0.5);
        assert_eq!(percentile(&s, 1.0), 4.0);
    }

    #[test]
    fn bootstrap_is_deterministic_per_stream() {
        let v: Vec<f64> = (0..30).map(|i| (i * 7 % 11) as f64).collect();
        assert_eq!(bootstrap_ci(&v, 0.95, 500, 3), bootstrap_ci(&v, 0.95, 500, 3));
        assert_ne!(bootstrap_ci(&v, 0.95, 500, 3), bootstrap_ci(&v, 0.95, 500, 4));
    }
}
