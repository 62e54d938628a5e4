use super::layout::open_room;
use super::{Difficulty, DifficultyParams, Event, TaskId, TaskRules};
use crate::grid::{Action, Behavior, EntityKind, GridState, ObjectKind, Outcome, Pos, ScriptedEntity};
use crate::rng::StreamRng;

/// Obstacles patrol whole rows back and forth, advancing every `speed_period`
/// steps. An obstacle that would enter the agent's cell ends the episode.
///
/// `task_vars = [speed_period, collided]`.
pub(crate) struct DynamicObstacles;

const PERIOD: usize = 0;
const COLLIDED: usize = 1;

/// Whether obstacles advance during the step that starts at `step_count`.
pub fn obstacles_move_at(period: i32, step_count: u32) -> bool {
    (step_count as i64 + 1) % period.max(1) as i64 == 0
}

/// Next `(x, heading)` of a horizontal patroller.
pub fn patrol_next(x: i32, heading: i32, lo: i32, hi: i32) -> (i32, i32) {
    let next = x + heading;
    if next < lo || next > hi {
        (x - heading, -heading)
    } else {
        (next, heading)
    }
}

pub fn speed_period(state: &GridState) -> i32 {
    state.task_vars.get(PERIOD).copied().unwrap_or(1)
}

impl TaskRules for DynamicObstacles {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let mut s = open_room(TaskId::DynamicObstacles, level, params);
        let (w, h) = (params.grid_w, params.grid_h);
        let ax = 1 + rng.below((w - 2) as u64) as i32;
        s.move_agent(Pos::new(ax, 1));
        let gx = 1 + rng.below((w - 2) as u64) as i32;
        s.set_object(Pos::new(gx, h - 2), ObjectKind::Goal, 0);
        let mut rows: Vec<i32> = (2..h - 2).collect();
        rng.shuffle(&mut rows);
        let count = params.entities("obstacle") as usize;
        if rows.len() < count {
            return None;
        }
        let mut chosen = rows[..count].to_vec();
        chosen.sort_unstable();
        for (id, y) in chosen.into_iter().enumerate() {
            let x = 1 + rng.below((w - 2) as u64) as i32;
            let heading = if rng.chance(0.5) { 1 } else { -1 };
            s.entities.push(ScriptedEntity {
                id: id as u8,
                kind: EntityKind::Obstacle,
                position: Pos::new(x, y),
                behavior: Behavior::Patrol { horizontal: true, lo: 1, hi: w - 2 },
                state: heading,
            });
        }
        s.sync_agents_layer();
        s.task_vars = vec![params.get("speed_period") as i32, 0];
        Some(s)
    }

    fn dynamics(&self, state: &mut GridState, _action: Action, events: &mut Vec<Event>) {
        if !obstacles_move_at(speed_period(state), state.step_count) {
            return;
        }
        for slot in 0..state.entities.len() {
            let e = &state.entities[slot];
            let Behavior::Patrol { lo, hi, .. } = e.behavior else { continue };
            let (nx, heading) = patrol_next(e.position.x, e.state, lo, hi);
            let to = Pos::new(nx, e.position.y);
            state.entities[slot].state = heading;
            if to == state.agent.position {
                state.task_vars[COLLIDED] = 1;
                events.push(Event::Collision);
                continue;
            }
            state.move_entity(slot, to);
        }
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        if state.task_vars.get(COLLIDED) == Some(&1) {
            Outcome::Failure
        } else if state.object_at(state.agent.position) == ObjectKind::Goal {
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
    fn patrol_bounces_at_ends() {
        assert_eq!(patrol_next(3, 1, 1, 5), (4, 1));
        assert_eq!(patrol_next(5, 1, 1, 5), (4, -1));
        assert_eq!(patrol_next(1, -1, 1, 5), (2, 1));
    }

    #[test]
    fn period_schedule() {
        assert!(!obstacles_move_at(3, 0));
        assert!(!obstacles_move_at(3, 1));
        assert!(obstacles_move_at(3, 2));
        assert!(obstacles_move_at(1, 0));
    }
}
