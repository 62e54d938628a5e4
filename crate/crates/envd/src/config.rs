use std::path::{Path, PathBuf};
use std::time::Duration;

use gridbench::RewardMode;

pub const DEFAULT_MAX_SESSIONS: usize = 256;
pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub max_sessions: usize,
    /// Sessions untouched for this long are finalized as truncated.
    pub idle_timeout: Duration,
    /// Holds the runs ledger, finished episode records and baseline caches.
    pub data_dir: PathBuf,
    pub bearer_token: Option<String>,
    pub reward_mode: RewardMode,
}

impl ServerConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        ServerConfig {
            max_sessions: DEFAULT_MAX_SESSIONS,
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
            data_dir: data_dir.into(),
            bearer_token: None,
            reward_mode: RewardMode::Sparse,
        }
    }

    pub fn ledger_path(&self) -> PathBuf {
        self.data_dir.join("runs.ndjson")
    }

    pub fn records_dir(&self) -> PathBuf {
        self.data_dir.join("records")
    }

    pub fn baseline_dir(&self) -> PathBuf {
        self.data_dir.join("baselines")
    }

    pub fn record_path(&self, session_id: &str) -> PathBuf {
        self.records_dir().join(format!("{session_id}.json"))
    }

    pub fn data_dir(&self) -> &Path {
        &self.data_dir
    }
}
