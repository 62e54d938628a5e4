//! LLM agents for gridbench.
//!
//! A [`HarnessAgent`] pairs a [`ChatBackend`] with a [`Preset`]: every step it
//! renders the current observation, builds a two-message prompt, asks the
//! backend and parses the reply into an action. Nothing is remembered between
//! steps.
//!
//! ```
//! use std::sync::Arc;
//! use gridbench::eval::{run_episode, EpisodeOptions};
//! use gridbench::{Difficulty, TaskId};
//! use gridbench_harness::{HarnessAgent, HarnessConfig, ScriptedBackend};
//!
//! let backend = Arc::new(ScriptedBackend::fixed("Nothing to do.\nACTION: 0"));
//! let mut agent = HarnessAgent::new(HarnessConfig::default(), backend);
//! let record = run_episode(&mut agent, TaskId::GoToGoal, Difficulty::Easy, 1, EpisodeOptions::default()).unwrap();
//! assert_eq!(record.steps.len(), 100);
//! assert_eq!(record.total_reward, 0.0);
//! ```

mod agent;
mod backend;
mod config;
mod parse;
mod prompt;

use thiserror::Error;

pub use agent::{ChatExchange, HarnessAgent};
pub use backend::{
    BackendError, ChatBackend, ChatResponse, HttpChatBackend, ScriptedBackend, Usage, DEFAULT_IN_FLIGHT, ENV_MODEL,
    ENV_TOKEN, ENV_URL, MAX_ATTEMPTS,
};
pub use config::{BackendKind, HarnessConfig, Preset, Sampling};
pub use parse::{parse_action, ParsedAction};
pub use prompt::{build_prompt, task_brief, Message, Role, REASONER_BLOCK};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid harness config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
}
