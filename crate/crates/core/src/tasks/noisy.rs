use super::go_to_goal::goal_room;
use super::layout::take_vacant;
use super::{agent_on_goal, Difficulty, DifficultyParams, TaskId, TaskRules};
use crate::grid::{GridState, ObjectKind, Outcome};
use crate::rng::StreamRng;

/// Goal room with inert scroll distractors; ghost duplicates are injected by
/// the observation pipeline only.
pub(crate) struct NoisyObservation;

impl TaskRules for NoisyObservation {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let min_dist = ((params.grid_w - 2) / 2) as u32;
        let mut s = goal_room(TaskId::NoisyObservation, params, level, rng, min_dist)?;
        for _ in 0..params.objects("scroll") {
            let p = take_vacant(&s, rng)?;
            s.set_object(p, ObjectKind::Scroll, 0);
        }
        Some(s)
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        agent_on_goal(state)
    }
}
