//! Evaluation protocol: seed pools, episode running, oracle-normalized
//! scoring with bootstrap intervals, aggregation, reports and SFT datasets.

mod aggregate;
mod baseline;
mod dataset;
mod episode;
mod report;
mod runner;
mod score;
mod seeds;

use std::path::PathBuf;

use thiserror::Error;

pub use aggregate::{aggregate, aggregate_partial, overall_from_categories, Aggregate, CategoryScore};
pub use baseline::{calibrate_baseline, calibration_stream, calibration_streams, run_calibration, Calibration, BASELINE_REPS};
pub use dataset::{export_dataset, validate_line, DatasetManifest, PairCount, DATASET_FILE, MANIFEST_FILE};
pub use episode::{
    replay_episode, run_episode, AgentFault, Decision, EpisodeOptions, EpisodeRecord, NoopPolicy, OraclePolicy,
    Policy, RandomPolicy, ScriptedPolicy, StepRecord,
};
pub use report::{build_report, emit_report, load_report, BenchmarkReport, ReportMetadata};
pub use runner::{default_workers, evaluate, EpisodeSlot, EvalPlan, Evaluation, PolicyFactory};
pub use score::{bootstrap_ci, compute_ons, mean, score_pair, ScoreRecord, BOOTSTRAP_RESAMPLES, DEGENERACY_EPSILON};
pub use seeds::{derive_seed, derive_seeds, SeedPool, EVAL_SEEDS, TRAIN_SEEDS};

use crate::error::EnvError;
use crate::tasks::{Category, Difficulty, TaskId};

/// Bumped whenever generation or transition semantics change; keys the baseline cache.
pub const ENGINE_VERSION: &str = concat!("gridbench-engine/1+", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("category `{}` has no non-degenerate pairs", .0.name())]
    EmptyCategory(Category),
    #[error("pair {task}/{difficulty} appears more than once")]
    DuplicatePair { task: TaskId, difficulty: Difficulty },
    #[error("replay diverged at step {step}: {detail}")]
    ReplayMismatch { step: usize, detail: String },
    #[error("no episodes requested")]
    NoEpisodes,
    #[error("worker pool: {0}")]
    Pool(String),
}

impl EvalError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        EvalError::Io { path: path.into(), source }
    }
}

/// Write `bytes` to `path` through a sibling temp file and an atomic rename.
pub(crate) fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> Result<(), EvalError> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| EvalError::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| EvalError::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| EvalError::io(path, e))?;
    tmp.persist(path).map_err(|e| EvalError::io(path, e.error))?;
    Ok(())
}
