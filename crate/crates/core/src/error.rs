use thiserror::Error;

use crate::tasks::{Difficulty, TaskId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvError {
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("unknown difficulty `{0}`")]
    UnknownDifficulty(String),
    #[error("episode already finished")]
    EpisodeFinished,
    #[error("invalid action code {0}")]
    InvalidAction(i64),
    #[error("no solvable layout for {task}/{difficulty} seed {seed} within the attempt budget")]
    GenerationExhausted { task: TaskId, difficulty: Difficulty, seed: u64 },
    #[error("seed list is empty")]
    NoSeeds,
}
