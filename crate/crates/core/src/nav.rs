//! Breadth-first planners over the current world.
//!
//! Expansion order is always up, down, left, right so ties resolve the same
//! way everywhere.

use std::collections::VecDeque;

use crate::grid::{meta, Direction, EntityKind, GridState, ObjectKind, Pos};

/// Shortest walk from `from` to `to` over cells accepted by `passable`
/// (the start cell is never tested). Returns the directions to take.
pub fn walk_path(state: &GridState, from: Pos, to: Pos, passable: impl Fn(Pos) -> bool) -> Option<Vec<Direction>> {
    if from == to {
        return Some(Vec::new());
    }
    let mut prev: Vec<Option<(Pos, Direction)>> = vec![None; state.cell_count()];
    let mut seen = vec![false; state.cell_count()];
    seen[state.idx(from)] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        for dir in Direction::ALL {
            let q = p.step(dir);
            if !state.in_bounds(q) || seen[state.idx(q)] || !passable(q) {
                continue;
            }
            seen[state.idx(q)] = true;
            prev[state.idx(q)] = Some((p, dir));
            if q == to {
                return Some(unwind(state, &prev, from, to));
            }
            queue.push_back(q);
        }
    }
    None
}

fn unwind(state: &GridState, prev: &[Option<(Pos, Direction)>], from: Pos, to: Pos) -> Vec<Direction> {
    let mut out = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, d) = prev[state.idx(cur)].expect("visited cell has a parent");
        out.push(d);
        cur = p;
    }
    out.reverse();
    out
}

/// BFS distances from `from` over walkable cells.
pub fn distance_map(state: &GridState, from: Pos, passable: impl Fn(Pos) -> bool) -> Vec<Option<u32>> {
    let mut dist = vec![None; state.cell_count()];
    dist[state.idx(from)] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        let d = dist[state.idx(p)].unwrap();
        for dir in Direction::ALL {
            let q = p.step(dir);
            if state.in_bounds(q) && dist[state.idx(q)].is_none() && passable(q) {
                dist[state.idx(q)] = Some(d + 1);
                queue.push_back(q);
            }
        }
    }
    dist
}

/// Shortest agent walk to `to` over currently walkable cells.
pub fn path_to(state: &GridState, to: Pos) -> Option<Vec<Direction>> {
    walk_path(state, state.agent.position, to, |p| state.is_walkable(p))
}

/// Blocking cells that turn the agent toward them when bumped.
pub fn turns_agent(state: &GridState, p: Pos) -> bool {
    if !state.in_bounds(p) {
        return false;
    }
    match state.object_at(p) {
        ObjectKind::Light => true,
        ObjectKind::Door => state.meta_at(p) & meta::ACTIVE == 0,
        _ => matches!(state.entity_at(p), Some(e) if e.kind == EntityKind::Quarry),
    }
}

/// Moves that leave the agent adjacent to and facing `target`, tracking
/// orientation: walking into a cell sets the heading, bumping a door, light
/// or quarry only turns. Among the four approach cells the cheapest wins,
/// ties going to the cell above, below, left, then right of the target.
pub fn face_plan(state: &GridState, target: Pos) -> Option<Vec<Direction>> {
    face_plan_with(state, target, |p| state.is_walkable(p))
}

pub fn face_plan_with(state: &GridState, target: Pos, passable: impl Fn(Pos) -> bool) -> Option<Vec<Direction>> {
    let start = (state.agent.position, state.agent.orientation);
    let key = |p: Pos, o: Direction| state.idx(p) * 4 + o.code() as usize;
    let mut prev: Vec<Option<(Pos, Direction, Direction)>> = vec![None; state.cell_count() * 4];
    let mut dist: Vec<Option<u32>> = vec![None; state.cell_count() * 4];
    dist[key(start.0, start.1)] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some((p, o)) = queue.pop_front() {
        let d = dist[key(p, o)].unwrap();
        for dir in Direction::ALL {
            let q = p.step(dir);
            let next = if q == target {
                if !turns_agent(state, q) {
                    continue;
                }
                (p, dir)
            } else if state.in_bounds(q) && passable(q) {
                (q, dir)
            } else if turns_agent(state, q) {
                (p, dir)
            } else {
                continue;
            };
            if dist[key(next.0, next.1)].is_some() {
                continue;
            }
            dist[key(next.0, next.1)] = Some(d + 1);
            prev[key(next.0, next.1)] = Some((p, o, dir));
            queue.push_back(next);
        }
    }
    let best = Direction::ALL
        .into_iter()
        .filter_map(|side| {
            let approach = target.step(side);
            if !state.in_bounds(approach) {
                return None;
            }
            let facing = side.opposite();
            dist[key(approach, facing)].map(|d| (d, approach, facing))
        })
        .min_by_key(|(d, _, _)| *d)?;
    let mut out = Vec::new();
    let mut cur = (best.1, best.2);
    while cur != start {
        let (pp, po, d) = prev[key(cur.0, cur.1)].expect("reached state has a parent");
        out.push(d);
        cur = (pp, po);
    }
    out.reverse();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tasks::{Difficulty, TaskId};

    fn room() -> GridState {
        GridState::empty_room(TaskId::GoToGoal, Difficulty::Easy, 7, 7, Pos::new(1, 1))
    }

    #[test]
    fn path_prefers_vertical_first() {
        let s = room();
        let path = path_to(&s, Pos::new(2, 2)).unwrap();
        assert_eq!(path, vec![Direction::South, Direction::East]);
    }

    #[test]
    fn facing_a_walkable_key_needs_an_approach_move() {
        let mut s = room();
        s.set_object(Pos::new(3, 1), ObjectKind::Key, 1);
        let plan = face_plan(&s, Pos::new(3, 1)).unwrap();
        assert_eq!(plan, vec![Direction::East]);
        // Facing away from the key: step back and come again.
        s.move_agent(Pos::new(2, 1));
        s.agent.orientation = Direction::West;
        let plan = face_plan(&s, Pos::new(3, 1)).unwrap();
        assert_eq!(plan.len(), 2);
        assert_eq!(*plan.last().unwrap(), Direction::East);
    }

    #[test]
    fn a_closed_door_is_faced_by_bumping() {
        let mut s = room();
        s.set_object(Pos::new(1, 2), ObjectKind::Door, 1);
        assert_eq!(face_plan(&s, Pos::new(1, 2)).unwrap(), vec![Direction::South]);
    }
}
