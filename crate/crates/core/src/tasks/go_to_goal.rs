use super::layout::{far_vacant_cell, open_room, place_agent_randomly, scatter_walls};
use super::{agent_on_goal, Difficulty, DifficultyParams, TaskId, TaskRules};
use crate::grid::{GridState, ObjectKind, Outcome};
use crate::rng::StreamRng;

pub(crate) struct GoToGoal;

/// Open room with scattered wall blocks, the agent and one goal at least `min_dist` apart.
pub(super) fn goal_room(
    task: TaskId,
    params: &DifficultyParams,
    level: Difficulty,
    rng: &mut StreamRng,
    min_dist: u32,
) -> Option<GridState> {
    let mut s = open_room(task, level, params);
    scatter_walls(&mut s, rng, params.objects("obstacles"));
    place_agent_randomly(&mut s, rng)?;
    let goal = far_vacant_cell(&s, rng, min_dist)?;
    s.set_object(goal, ObjectKind::Goal, 0);
    Some(s)
}

impl TaskRules for GoToGoal {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let min_dist = ((params.grid_w - 2) / 2) as u32;
        goal_room(TaskId::GoToGoal, params, level, rng, min_dist)
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        agent_on_goal(state)
    }
}
