use super::layout::{open_room, place_agent_randomly, vacant_cells};
use super::{Difficulty, DifficultyParams, Event, TaskId, TaskRules};
use crate::grid::{faced_cell, Action, Behavior, Direction, EntityKind, GridState, Outcome, Pos, ScriptedEntity};
use crate::rng::StreamRng;

/// Quarries flee from the agent when it comes within `flee_radius`, and
/// otherwise wander. They move once every `speed_period` steps. Interacting
/// while facing a quarry tags it and removes it from the board.
///
/// `task_vars = [speed_period, wander_per_mille, flee_radius, tagged, total]`.
pub(crate) struct TagHunt;

const PERIOD: usize = 0;
const WANDER: usize = 1;
const RADIUS: usize = 2;
const TAGGED: usize = 3;
const TOTAL: usize = 4;

/// Whether a scripted entity may step onto `p`.
pub(crate) fn entity_can_enter(state: &GridState, p: Pos) -> bool {
    state.is_walkable(p) && state.agents[state.idx(p)] == 0
}

/// Where a fleeing quarry at `from` goes: the reachable cell (staying
/// included) farthest from `threat`, preferring to stay, then up, down, left, right.
pub fn flee_step(state: &GridState, from: Pos, threat: Pos) -> Pos {
    let mut best = from;
    let mut best_d = from.manhattan(threat);
    for dir in Direction::ALL {
        let q = from.step(dir);
        if entity_can_enter(state, q) && q.manhattan(threat) > best_d {
            best = q;
            best_d = q.manhattan(threat);
        }
    }
    best
}

pub(crate) fn random_step(state: &GridState, from: Pos, rng: &mut StreamRng) -> Option<Pos> {
    let options: Vec<Pos> = Direction::ALL.iter().map(|d| from.step(*d)).filter(|q| entity_can_enter(state, *q)).collect();
    rng.choose(&options).copied()
}

impl TaskRules for TagHunt {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let mut s = open_room(TaskId::TagHunt, level, params);
        place_agent_randomly(&mut s, rng)?;
        let count = params.entities("quarry");
        for id in 0..count {
            let agent = s.agent.position;
            let cells: Vec<Pos> = vacant_cells(&s).into_iter().filter(|p| p.manhattan(agent) >= 2).collect();
            let p = *rng.choose(&cells)?;
            s.entities.push(ScriptedEntity {
                id: id as u8,
                kind: EntityKind::Quarry,
                position: p,
                behavior: Behavior::Flee,
                state: 0,
            });
            s.sync_agents_layer();
        }
        s.task_vars = vec![
            params.get("speed_period") as i32,
            (params.get("wander_rate") * 1000.0).round() as i32,
            params.get("flee_radius") as i32,
            0,
            count as i32,
        ];
        Some(s)
    }

    fn interact(&self, state: &mut GridState, events: &mut Vec<Event>) -> bool {
        let p = faced_cell(state);
        let Some(slot) = state.entities.iter().position(|e| e.position == p && e.kind == EntityKind::Quarry) else {
            return false;
        };
        let i = state.idx(p);
        state.agents[i] = 0;
        state.entities.remove(slot);
        state.task_vars[TAGGED] += 1;
        events.push(Event::QuarryTagged);
        true
    }

    fn dynamics(&self, state: &mut GridState, _action: Action, _events: &mut Vec<Event>) {
        let period = state.task_vars[PERIOD].max(1) as u32;
        if !(state.step_count + 1).is_multiple_of(period) {
            return;
        }
        let wander = state.task_vars[WANDER] as f64 / 1000.0;
        let radius = state.task_vars[RADIUS] as u32;
        let agent = state.agent.position;
        let mut rng = state.rng;
        for slot in 0..state.entities.len() {
            let from = state.entities[slot].position;
            let to = if from.manhattan(agent) <= radius {
                Some(flee_step(state, from, agent))
            } else if rng.chance(wander) {
                random_step(state, from, &mut rng)
            } else {
                None
            };
            if let Some(to) = to.filter(|t| *t != from) {
                state.move_entity(slot, to);
            }
        }
        state.rng = rng;
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        if state.task_vars.get(TAGGED) == state.task_vars.get(TOTAL) {
            Outcome::Success
        } else {
            Outcome::Running
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cornered_quarry_stays_put() {
        let mut s = GridState::empty_room(TaskId::TagHunt, Difficulty::Easy, 7, 7, Pos::new(2, 1));
        s.entities.push(ScriptedEntity {
            id: 0,
            kind: EntityKind::Quarry,
            position: Pos::new(1, 1),
            behavior: Behavior::Flee,
            state: 0,
        });
        s.sync_agents_layer();
        // Moving down keeps distance 2 > 1, so the quarry slips away south.
        assert_eq!(flee_step(&s, Pos::new(1, 1), Pos::new(2, 1)), Pos::new(1, 2));
        assert_eq!(flee_step(&s, Pos::new(1, 1), Pos::new(2, 2)), Pos::new(1, 1));
    }
}
