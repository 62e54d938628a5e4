use super::layout::{open_room, vacant_cells};
use super::tag_hunt::entity_can_enter;
use super::{Difficulty, DifficultyParams, Event, TaskId, TaskRules};
use crate::grid::{Action, Behavior, Direction, EntityKind, GridState, ObjectKind, Outcome, Pos, ScriptedEntity};
use crate::rng::StreamRng;

/// Sheep are driven by proximity: a sheep orthogonally next to the agent
/// steps directly away, sliding sideways (up, down, left, right) when the way
/// ahead is blocked. Unpressured sheep outside the pen wander. Sheep never
/// leave the inner area one cell in from the outer walls.
///
/// `task_vars = [wander_per_mille, pen_x, pen_y, pen_side]`.
pub(crate) struct Herding;

/// Top-left corner and side of the pen.
pub fn pen_rect(state: &GridState) -> (Pos, i32) {
    let v = &state.task_vars;
    (Pos::new(v[1], v[2]), v[3])
}

pub fn in_pen(state: &GridState, p: Pos) -> bool {
    let (o, side) = pen_rect(state);
    p.x >= o.x && p.y >= o.y && p.x < o.x + side && p.y < o.y + side
}

/// Sheep pasture: cells at least two away from the grid edge.
pub fn in_pasture(state: &GridState, p: Pos) -> bool {
    p.x >= 2 && p.y >= 2 && p.x <= state.width - 3 && p.y <= state.height - 3
}

fn sheep_can_enter(state: &GridState, p: Pos) -> bool {
    in_pasture(state, p) && entity_can_enter(state, p)
}

/// Where a sheep standing next to the agent is pushed, if anywhere.
pub fn pushed_to(state: &GridState, sheep: Pos, agent: Pos) -> Option<Pos> {
    let away = agent.direction_to_adjacent(sheep)?;
    std::iter::once(away)
        .chain(Direction::ALL.into_iter().filter(|d| *d != away && *d != away.opposite()))
        .map(|d| sheep.step(d))
        .find(|q| sheep_can_enter(state, *q))
}

impl TaskRules for Herding {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let mut s = open_room(TaskId::Herding, level, params);
        let side = params.get("pen_side") as i32;
        let span = params.grid_w - 4 - side + 1;
        if span < 1 {
            return None;
        }
        let px = 2 + rng.below(span as u64) as i32;
        let py = 2 + rng.below(span as u64) as i32;
        for y in py..py + side {
            for x in px..px + side {
                s.set_object(Pos::new(x, y), ObjectKind::Pen, 0);
            }
        }
        s.task_vars = vec![(params.get("wander_rate") * 1000.0).round() as i32, px, py, side];
        for id in 0..params.entities("sheep") {
            let cells: Vec<Pos> = vacant_cells(&s).into_iter().filter(|p| in_pasture(&s, *p)).collect();
            let p = *rng.choose(&cells)?;
            s.entities.push(ScriptedEntity { id: id as u8, kind: EntityKind::Sheep, position: p, behavior: Behavior::Herd, state: 0 });
            s.sync_agents_layer();
        }
        let sheep: Vec<Pos> = s.entities.iter().map(|e| e.position).collect();
        let cells: Vec<Pos> = vacant_cells(&s)
            .into_iter()
            .filter(|p| sheep.iter().all(|q| !q.is_adjacent(*p)))
            .collect();
        let start = *rng.choose(&cells)?;
        s.move_agent(start);
        Some(s)
    }

    fn dynamics(&self, state: &mut GridState, _action: Action, events: &mut Vec<Event>) {
        let wander = state.task_vars[0] as f64 / 1000.0;
        let agent = state.agent.position;
        let mut rng = state.rng;
        for slot in 0..state.entities.len() {
            let from = state.entities[slot].position;
            let to = if from.is_adjacent(agent) {
                pushed_to(state, from, agent)
            } else if !in_pen(state, from) && rng.chance(wander) {
                let options: Vec<Pos> =
                    Direction::ALL.iter().map(|d| from.step(*d)).filter(|q| sheep_can_enter(state, *q)).collect();
                rng.choose(&options).copied()
            } else {
                None
            };
            if let Some(to) = to {
                state.move_entity(slot, to);
                if in_pen(state, to) && !in_pen(state, from) {
                    events.push(Event::SheepPenned);
                }
            }
        }
        state.rng = rng;
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        if state.entities.iter().all(|e| in_pen(state, e.position)) {
            Outcome::Success
        } else {
            Outcome::Running
        }
    }
}
