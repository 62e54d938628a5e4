//! Time-expanded search for the patrolling-obstacle task: obstacle motion
//! does not depend on the agent, so their future positions are known.

use std::collections::VecDeque;

use crate::grid::{Action, Behavior, Direction, GridState, ObjectKind, Pos, Terrain};
use crate::tasks::dynamic_obstacles::{obstacles_move_at, patrol_next, speed_period};

/// Obstacle cells at the start of each of the next `horizon + 1` steps,
/// together with where each one tries to go during that step.
fn forecast(state: &GridState, horizon: usize) -> Vec<Vec<(Pos, Pos)>> {
    let period = speed_period(state);
    let mut movers: Vec<(Pos, i32, i32, i32)> = state
        .entities
        .iter()
        .filter_map(|e| match e.behavior {
            Behavior::Patrol { lo, hi, .. } => Some((e.position, e.state, lo, hi)),
            _ => None,
        })
        .collect();
    let mut out = Vec::with_capacity(horizon + 1);
    for k in 0..=horizon {
        let moving = obstacles_move_at(period, state.step_count + k as u32);
        let mut step = Vec::with_capacity(movers.len());
        for m in movers.iter_mut() {
            let (from, heading, lo, hi) = *m;
            let (to, next_heading) = if moving {
                let (nx, h) = patrol_next(from.x, heading, lo, hi);
                (Pos::new(nx, from.y), h)
            } else {
                (from, heading)
            };
            step.push((from, to));
            *m = (to, next_heading, lo, hi);
        }
        out.push(step);
    }
    out
}

/// Shortest collision-free action list to the goal.
pub fn plan(state: &GridState) -> Option<Vec<Action>> {
    let goal = *state.positions_of(ObjectKind::Goal).first()?;
    let horizon = state.max_steps.saturating_sub(state.step_count) as usize;
    let future = forecast(state, horizon);
    let n = state.cell_count();
    let open = |p: Pos| state.in_bounds(p) && state.terrain_at(p) != Terrain::Wall && !state.object_blocks(p);
    let mut prev: Vec<Option<(u32, Action)>> = vec![None; n * (horizon + 1)];
    let mut seen = vec![false; n * (horizon + 1)];
    let start = state.agent.position;
    seen[state.idx(start)] = true;
    let mut queue = VecDeque::from([(start, 0usize)]);
    let moves = [Action::Noop].into_iter().chain(Direction::ALL.into_iter().map(Direction::move_action));
    let moves: Vec<Action> = moves.collect();
    while let Some((p, k)) = queue.pop_front() {
        if k >= horizon {
            continue;
        }
        let occupied = &future[k];
        for &a in &moves {
            let dest = match a.direction() {
                Some(d) => {
                    let q = p.step(d);
                    if open(q) && !occupied.iter().any(|(from, _)| *from == q) {
                        q
                    } else {
                        p
                    }
                }
                None => p,
            };
            if occupied.iter().any(|(from, to)| from != to && *to == dest) {
                continue;
            }
            let slot = (k + 1) * n + state.idx(dest);
            if seen[slot] {
                continue;
            }
            seen[slot] = true;
            prev[slot] = Some(((k * n + state.idx(p)) as u32, a));
            if dest == goal {
                let mut actions = Vec::new();
                let mut cur = slot;
                while let Some((from, a)) = prev[cur] {
                    actions.push(a);
                    cur = from as usize;
                }
                actions.reverse();
                return Some(actions);
            }
            queue.push_back((dest, k + 1));
        }
    }
    None
}
