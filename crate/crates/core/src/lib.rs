//! Deterministic gridworld benchmark: procedurally generated tasks, five
//! synchronized observation modalities, a coding API with scripted oracle
//! policies, and oracle-normalized scoring.
//!
//! ```
//! use gridbench::{Env, TaskId, Difficulty};
//!
//! let mut env = Env::new(TaskId::GoToGoal, Difficulty::Easy, 7).unwrap();
//! let first = env.bundle(false);
//! assert!(first.ascii.contains('^'));
//! let result = env.step(0).unwrap();
//! assert_eq!(env.state().step_count, 1);
//! assert_eq!(result.reward, 0.0);
//! ```

pub mod api;
pub mod env;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod grid;
pub mod nav;
pub mod obs;
pub mod oracle;
pub mod rng;
pub mod tasks;

pub use api::{Api, ApiError, ApiView, EntityInfo};
pub use env::{reset_env, Env};
pub use error::EnvError;
pub use grid::{step_env, valid_actions_of, Action, Direction, GridState, ObjectKind, Outcome, Pos, StepResult};
pub use obs::{ObsMode, ObservationBundle};
pub use oracle::{oracle_act, random_act, OracleState};
pub use tasks::{Category, Difficulty, RewardMode, TaskId};
