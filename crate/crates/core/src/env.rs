//! Episode wrapper: a [`GridState`] plus the observer-side fog memory.

use crate::error::EnvError;
use crate::grid::{step_env, valid_actions_of, Action, GridState, StepResult};
use crate::obs::{self, reveal_around, ObsMode, Observation, ObservationBundle, Snapshot};
use crate::tasks::{generate_layout, Difficulty, RewardMode, TaskId};

/// Deterministic initial state for `(task, difficulty, seed)`.
pub fn reset_env(task: TaskId, difficulty: Difficulty, seed: u64) -> Result<GridState, EnvError> {
    generate_layout(task.spec(), difficulty, seed)
}

/// Radius of the revealed square around the agent in fog tasks.
pub const FOG_RADIUS: i32 = 1;

#[derive(Debug, Clone)]
pub struct Env {
    state: GridState,
    explored: Option<Vec<bool>>,
}

impl Env {
    pub fn new(task: TaskId, difficulty: Difficulty, seed: u64) -> Result<Self, EnvError> {
        Ok(Env::from_state(reset_env(task, difficulty, seed)?))
    }

    pub fn with_reward_mode(mut self, mode: RewardMode) -> Self {
        self.state.reward_mode = mode;
        self
    }

    /// Wrap an existing state; fog memory starts from the agent's current surroundings.
    pub fn from_state(state: GridState) -> Self {
        let explored = (state.task == TaskId::FogOfWarExploration).then(|| {
            let mut mask = vec![false; state.cell_count()];
            reveal_around(&state, &mut mask, state.agent.position, FOG_RADIUS);
            mask
        });
        Env { state, explored }
    }

    pub fn state(&self) -> &GridState {
        &self.state
    }

    pub fn into_state(self) -> GridState {
        self.state
    }

    /// Cells revealed so far, when the task hides the map.
    pub fn visibility(&self) -> Option<&[bool]> {
        self.explored.as_deref()
    }

    pub fn is_done(&self) -> bool {
        self.state.outcome.is_terminal()
    }

    /// Step with a raw action code.
    pub fn step(&mut self, code: i64) -> Result<StepResult, EnvError> {
        let action = Action::from_code(code).ok_or(EnvError::InvalidAction(code))?;
        self.act(action)
    }

    pub fn act(&mut self, action: Action) -> Result<StepResult, EnvError> {
        let result = step_env(&mut self.state, action)?;
        if let Some(mask) = self.explored.as_mut() {
            reveal_around(&self.state, mask, self.state.agent.position, FOG_RADIUS);
        }
        Ok(result)
    }

    pub fn valid_actions(&self) -> Vec<Action> {
        valid_actions_of(&self.state)
    }

    pub fn snapshot(&self) -> Snapshot<'_> {
        Snapshot::new(&self.state, self.visibility())
    }

    pub fn observe(&self, mode: ObsMode) -> Observation {
        obs::observe(&self.snapshot(), mode)
    }

    pub fn bundle(&self, with_pixels: bool) -> ObservationBundle {
        obs::render_bundle(&self.snapshot(), with_pixels)
    }
}
