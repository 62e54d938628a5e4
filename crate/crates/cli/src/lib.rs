//! Entry points behind the `gridbench` binary.
//!
//! An experiment is a YAML file:
//!
//! ```
//! use gridbench_cli::ExperimentConfig;
//!
//! let yaml = "agent: oracle\ntasks: [GoToGoal]\ndifficulties: [easy, medium]\nseeds: 5\noutput_dir: out\n";
//! let exp = ExperimentConfig::from_yaml(yaml, "exp.yaml".as_ref()).unwrap().resolve().unwrap();
//! assert_eq!(exp.difficulties.len(), 2);
//! ```

mod commands;
mod config;
mod run;

pub use commands::{oracle_check_rows, replay_file, task_table, OracleRow, ReplayOutcome};
pub use config::{AgentSpec, ConfigError, ExperimentConfig, ResolvedExperiment, Selection};
pub use run::{run_experiment, RunError, RunSummary, EPISODES_FILE, REPORT_FILE};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/environment.md")]
    mod environment {}
    #[doc = include_str!("../../../book/src/observations.md")]
    mod observations {}
    #[doc = include_str!("../../../book/src/coding-api.md")]
    mod coding_api {}
    #[doc = include_str!("../../../book/src/scoring.md")]
    mod scoring {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/service.md")]
    mod service {}
}
