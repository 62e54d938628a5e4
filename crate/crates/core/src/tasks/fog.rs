use super::go_to_goal::goal_room;
use super::{agent_on_goal, Difficulty, DifficultyParams, TaskId, TaskRules};
use crate::grid::{GridState, Outcome};
use crate::rng::StreamRng;

/// Goal search under fog. The fog itself lives in the observation layer
/// (see `Env`), so the transition rules are those of a plain goal room.
pub(crate) struct FogOfWar;

impl TaskRules for FogOfWar {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let min_dist = (params.grid_w - 2) as u32;
        goal_room(TaskId::FogOfWarExploration, params, level, rng, min_dist)
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        agent_on_goal(state)
    }
}
