use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use gridbench::eval::{calibrate_baseline, compute_ons, EpisodeRecord};
use gridbench::oracle::run_oracle;
use gridbench::{reset_env, Difficulty, Outcome, TaskId};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

/// Stored outcome of finalizing a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalizeResult {
    pub session_id: String,
    pub owner_tag: String,
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub seed: u64,
    #[serde(rename = "return")]
    pub episode_return: f64,
    /// `None` when the pair is degenerate.
    pub ons: Option<f64>,
    pub degenerate: bool,
    pub random_baseline: f64,
    pub oracle_return: f64,
    pub outcome: Outcome,
    pub steps: usize,
    pub timestamp: String,
    pub record_path: String,
}

/// One line of the runs ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub owner_tag: String,
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub seed: u64,
    #[serde(rename = "return")]
    pub episode_return: f64,
    pub ons: Option<f64>,
    pub timestamp: String,
    pub degenerate: bool,
}

impl From<&FinalizeResult> for LedgerRow {
    fn from(r: &FinalizeResult) -> Self {
        LedgerRow {
            owner_tag: r.owner_tag.clone(),
            task: r.task,
            difficulty: r.difficulty,
            seed: r.seed,
            episode_return: r.episode_return,
            ons: r.ons,
            timestamp: r.timestamp.clone(),
            degenerate: r.degenerate,
        }
    }
}

pub struct EpisodeScore {
    pub ons: Option<f64>,
    pub random_baseline: f64,
    pub oracle_return: f64,
}

/// Score one episode against the pair's random baseline and the oracle's
/// return on the same seed.
pub fn score_episode(record: &EpisodeRecord, baseline_dir: &Path) -> Result<EpisodeScore, ServiceError> {
    let cal = calibrate_baseline(record.task, record.difficulty, record.reward_mode, Some(baseline_dir))?;
    let mut start = reset_env(record.task, record.difficulty, record.seed)?;
    start.reward_mode = record.reward_mode;
    let oracle_return = run_oracle(&start).cumulative_reward;
    Ok(EpisodeScore {
        ons: compute_ons(record.total_reward, cal.random_baseline, oracle_return),
        random_baseline: cal.random_baseline,
        oracle_return,
    })
}

pub fn append_row(path: &Path, row: &LedgerRow) -> Result<(), ServiceError> {
    let io = |e: std::io::Error| ServiceError::Internal(format!("ledger {}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut line = serde_json::to_string(row).expect("ledger row serializes");
    line.push('\n');
    let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    file.write_all(line.as_bytes()).map_err(io)
}

pub fn read_ledger(path: &Path) -> Result<Vec<LedgerRow>, ServiceError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(ServiceError::Internal(format!("ledger {}: {e}", path.display()))),
    };
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| ServiceError::Internal(format!("ledger row: {e}"))))
        .collect()
}
