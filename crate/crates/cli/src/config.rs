use std::path::{Path, PathBuf};

use gridbench::eval::EVAL_SEEDS;
use gridbench::{Difficulty, ObsMode, RewardMode, TaskId};
use gridbench_harness::HarnessConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
}

/// Which agent plays the episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentSpec {
    Oracle,
    Random,
    Harness(HarnessConfig),
}

impl AgentSpec {
    pub fn label(&self) -> String {
        match self {
            AgentSpec::Oracle => "oracle".into(),
            AgentSpec::Random => "random".into(),
            AgentSpec::Harness(h) if h.model_name.is_empty() => "harness".into(),
            AgentSpec::Harness(h) => format!("harness:{}", h.model_name),
        }
    }
}

/// `all`, a single name, or a list of names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Selection {
    One(String),
    Many(Vec<String>),
}

impl Default for Selection {
    fn default() -> Self {
        Selection::One("all".into())
    }
}

impl Selection {
    pub fn resolve<T: Copy + PartialEq + std::str::FromStr>(
        &self,
        field: &'static str,
        all: &[T],
    ) -> Result<Vec<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        let names: Vec<&str> = match self {
            Selection::One(s) if s.eq_ignore_ascii_case("all") => return Ok(all.to_vec()),
            Selection::One(s) => vec![s.as_str()],
            Selection::Many(v) => v.iter().map(String::as_str).collect(),
        };
        if names.is_empty() {
            return Err(ConfigError::Invalid { field, message: "list is empty".into() });
        }
        let mut out = Vec::with_capacity(names.len());
        for name in names {
            let v: T = name.parse().map_err(|e| ConfigError::Invalid { field, message: format!("{e}") })?;
            if out.contains(&v) {
                return Err(ConfigError::Invalid { field, message: format!("`{name}` listed twice") });
            }
            out.push(v);
        }
        Ok(out)
    }
}

fn default_seeds() -> usize {
    EVAL_SEEDS
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

/// One experiment, as read from a YAML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(with = "serde_yaml::with::singleton_map")]
    pub agent: AgentSpec,
    #[serde(default)]
    pub tasks: Selection,
    #[serde(default)]
    pub difficulties: Selection,
    #[serde(default)]
    pub obs_mode: ObsMode,
    #[serde(default)]
    pub reward_mode: RewardMode,
    /// Eval-pool seeds per (task, difficulty).
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Keep per-step ascii and language observations in the episode log.
    #[serde(default)]
    pub log_observations: bool,
    /// Where calibration results are cached; defaults to `output_dir/baselines`.
    #[serde(default)]
    pub baseline_cache: Option<PathBuf>,
}

/// A validated experiment with every selection expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedExperiment {
    pub config: ExperimentConfig,
    pub tasks: Vec<TaskId>,
    pub difficulties: Vec<Difficulty>,
}

impl ExperimentConfig {
    pub fn from_yaml(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        serde_yaml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.to_path_buf(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_yaml(&text, path)
    }

    pub fn resolve(self) -> Result<ResolvedExperiment, ConfigError> {
        let tasks = self.tasks.resolve("tasks", &TaskId::ALL)?;
        let difficulties = self.difficulties.resolve("difficulties", &Difficulty::ALL)?;
        if self.seeds == 0 {
            return Err(ConfigError::Invalid { field: "seeds", message: "must be at least 1".into() });
        }
        if self.workers == Some(0) {
            return Err(ConfigError::Invalid { field: "workers", message: "must be at least 1".into() });
        }
        if let AgentSpec::Harness(h) = &self.agent {
            let mut h = h.clone();
            h.obs_mode = self.obs_mode;
            h.validate().map_err(|e| ConfigError::Invalid { field: "agent.harness", message: e.to_string() })?;
        }
        Ok(ResolvedExperiment { config: self, tasks, difficulties })
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.baseline_cache.clone().unwrap_or_else(|| self.output_dir.join("baselines"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ResolvedExperiment, ConfigError> {
        ExperimentConfig::from_yaml(text, Path::new("test.yaml"))?.resolve()
    }

    #[test]
    fn minimal_config_selects_everything() {
        let r = parse("agent: oracle\n").unwrap();
        assert_eq!(r.tasks.len(), 12);
        assert_eq!(r.difficulties.len(), 4);
        assert_eq!(r.config.seeds, 25);
        assert_eq!(r.config.reward_mode, RewardMode::Sparse);
    }

    #[test]
    fn lists_and_harness_blocks_parse() {
        let r = parse(
            "agent:\n  harness:\n    preset: markovian\n    model_name: qwen\n    backend: scripted\n\
             tasks: [GoToGoal, LightsOut]\ndifficulties: hard\nobs_mode: language\nseeds: 3\n",
        )
        .unwrap();
        assert_eq!(r.tasks, [TaskId::GoToGoal, TaskId::LightsOut]);
        assert_eq!(r.difficulties, [Difficulty::Hard]);
        assert_eq!(r.config.agent.label(), "harness:qwen");
    }

    #[test]
    fn errors_name_the_offending_field() {
        let e = parse("agent: oracle\ntasks: [Pinball]\n").unwrap_err();
        assert!(matches!(e, ConfigError::Invalid { field: "tasks", .. }), "{e}");
        let e = parse("agent: oracle\nseeds: 0\n").unwrap_err();
        assert!(e.to_string().contains("`seeds`"));
        let e = parse("agent: oracle\nharness_typo: 1\n").unwrap_err();
        assert!(e.to_string().contains("harness_typo"));
        let e = parse("agent:\n  harness: {}\nobs_mode: pixels\n").unwrap_err();
        assert!(matches!(e, ConfigError::Invalid { field: "agent.harness", .. }));
    }
}
