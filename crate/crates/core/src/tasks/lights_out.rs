use super::layout::{open_room, place_agent_randomly};
use super::{Difficulty, DifficultyParams, Event, TaskId, TaskRules};
use crate::grid::{faced_cell, meta, GridState, ObjectKind, Outcome, Pos};
use crate::rng::StreamRng;

/// Lights sit on every other cell so the agent can walk between them.
/// Interacting with a faced light flips it and its board neighbors.
///
/// `task_vars = [board_side, origin_x, origin_y]`.
pub(crate) struct LightsOut;

pub fn board_size(state: &GridState) -> usize {
    state.task_vars.first().copied().unwrap_or(0) as usize
}

/// Grid position of board cell `(col, row)`.
fn board_pos(state: &GridState, col: usize, row: usize) -> Pos {
    Pos::new(state.task_vars[1] + 2 * col as i32, state.task_vars[2] + 2 * row as i32)
}

/// Light positions in row-major board order.
pub fn board_cells(state: &GridState) -> Vec<Pos> {
    let n = board_size(state);
    (0..n).flat_map(|r| (0..n).map(move |c| (c, r))).map(|(c, r)| board_pos(state, c, r)).collect()
}

fn board_coords(state: &GridState, p: Pos) -> Option<(usize, usize)> {
    let n = board_size(state) as i32;
    let (dx, dy) = (p.x - state.task_vars[1], p.y - state.task_vars[2]);
    if dx < 0 || dy < 0 || dx % 2 != 0 || dy % 2 != 0 || dx / 2 >= n || dy / 2 >= n {
        return None;
    }
    Some(((dx / 2) as usize, (dy / 2) as usize))
}

fn flip(state: &mut GridState, p: Pos, events: &mut Vec<Event>) {
    let i = state.idx(p);
    state.metadata[i] ^= meta::ACTIVE;
    events.push(if state.metadata[i] & meta::ACTIVE != 0 { Event::LightOn } else { Event::LightOff });
}

/// Flip the light at board `(col, row)` and its orthogonal board neighbors.
pub(crate) fn press(state: &mut GridState, col: usize, row: usize, events: &mut Vec<Event>) {
    let n = board_size(state) as i64;
    for (dc, dr) in [(0i64, 0i64), (0, -1), (0, 1), (-1, 0), (1, 0)] {
        let (c, r) = (col as i64 + dc, row as i64 + dr);
        if c >= 0 && r >= 0 && c < n && r < n {
            let p = board_pos(state, c as usize, r as usize);
            flip(state, p, events);
        }
    }
}

impl TaskRules for LightsOut {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let mut s = open_room(TaskId::LightsOut, level, params);
        let n = params.get("board_size") as i32;
        let span = 2 * n - 1;
        let slack = params.grid_w - 2 - span;
        if slack < 0 {
            return None;
        }
        let ox = 1 + rng.below(slack as u64 + 1) as i32;
        let oy = 1 + rng.below(slack as u64 + 1) as i32;
        s.task_vars = vec![n, ox, oy];
        for p in board_cells(&s) {
            s.set_object(p, ObjectKind::Light, 0);
        }
        let mut presses: Vec<usize> = (0..(n * n) as usize).collect();
        rng.shuffle(&mut presses);
        let mut scratch = Vec::new();
        for cell in presses.into_iter().take(params.get("toggles") as usize) {
            press(&mut s, cell % n as usize, cell / n as usize, &mut scratch);
        }
        place_agent_randomly(&mut s, rng)?;
        Some(s)
    }

    fn interact(&self, state: &mut GridState, events: &mut Vec<Event>) -> bool {
        let p = faced_cell(state);
        if state.object_at(p) != ObjectKind::Light {
            return false;
        }
        if let Some((c, r)) = board_coords(state, p) {
            press(state, c, r, events);
        }
        true
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        let any_on = board_cells(state).into_iter().any(|p| state.meta_at(p) & meta::ACTIVE != 0);
        if any_on {
            Outcome::Running
        } else {
            Outcome::Success
        }
    }
}
