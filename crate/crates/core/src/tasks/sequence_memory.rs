use super::layout::{open_room, place_agent_randomly, vacant_cells};
use super::{Difficulty, DifficultyParams, Event, TaskId, TaskRules};
use crate::grid::{meta, Action, GridState, ObjectKind, Outcome, Pos};
use crate::rng::StreamRng;

/// Observation phase: for the first `L` steps the agent is frozen and tile
/// `seq[t]` is shown flashing in the observation at step `t`. Recall phase:
/// stepping on the next tile in order marks it; stepping on any other
/// unmarked tile fails the episode.
///
/// `task_vars = [L, progress, failed, (x, y) * L]`.
pub(crate) struct SequenceMemory;

pub fn sequence_len(state: &GridState) -> usize {
    state.task_vars.first().copied().unwrap_or(0) as usize
}

pub fn recalled_count(state: &GridState) -> usize {
    state.task_vars.get(1).copied().unwrap_or(0) as usize
}

pub fn sequence_cells(state: &GridState) -> Vec<Pos> {
    let n = sequence_len(state);
    (0..n).map(|i| Pos::new(state.task_vars[3 + 2 * i], state.task_vars[4 + 2 * i])).collect()
}

/// Tile shown flashing in the observation taken at the current step, if any.
pub fn flashing_tile(state: &GridState) -> Option<Pos> {
    if state.task != TaskId::SequenceMemory {
        return None;
    }
    let t = state.step_count as usize;
    (t < sequence_len(state)).then(|| Pos::new(state.task_vars[3 + 2 * t], state.task_vars[4 + 2 * t]))
}

impl TaskRules for SequenceMemory {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let mut s = open_room(TaskId::SequenceMemory, level, params);
        let len = params.get("sequence_length") as usize;
        let mut tiles: Vec<Pos> = Vec::with_capacity(len);
        for _ in 0..len {
            // Keep tiles apart so none walls off another.
            let cells: Vec<Pos> = vacant_cells(&s)
                .into_iter()
                .filter(|p| tiles.iter().all(|t| t.manhattan(*p) > 1 && (t.x - p.x).abs().max((t.y - p.y).abs()) > 1))
                .collect();
            let p = *rng.choose(&cells)?;
            s.set_object(p, ObjectKind::Tile, 0);
            tiles.push(p);
        }
        place_agent_randomly(&mut s, rng)?;
        let mut vars = vec![len as i32, 0, 0];
        vars.extend(tiles.iter().flat_map(|p| [p.x, p.y]));
        s.task_vars = vars;
        Some(s)
    }

    fn agent_frozen(&self, state: &GridState) -> bool {
        (state.step_count as usize) < sequence_len(state)
    }

    fn dynamics(&self, state: &mut GridState, _action: Action, events: &mut Vec<Event>) {
        if self.agent_frozen(state) {
            return;
        }
        let here = state.agent.position;
        if state.object_at(here) != ObjectKind::Tile || state.meta_at(here) & meta::ACTIVE != 0 {
            return;
        }
        let progress = recalled_count(state);
        if sequence_cells(state).get(progress) == Some(&here) {
            let i = state.idx(here);
            state.metadata[i] |= meta::ACTIVE;
            state.task_vars[1] += 1;
            events.push(Event::TileCorrect);
        } else {
            state.task_vars[2] = 1;
            events.push(Event::TileWrong);
        }
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        if state.task_vars.get(2) == Some(&1) {
            Outcome::Failure
        } else if recalled_count(state) == sequence_len(state) {
            Outcome::Success
        } else {
            Outcome::Running
        }
    }
}
