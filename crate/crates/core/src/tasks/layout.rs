//! Small building blocks shared by the layout generators.

use std::collections::VecDeque;

use super::{Difficulty, DifficultyParams, TaskId};
use crate::grid::{Direction, GridState, ObjectKind, Pos, Terrain};
use crate::rng::StreamRng;

pub(crate) fn open_room(task: TaskId, level: Difficulty, params: &DifficultyParams) -> GridState {
    GridState::empty_room(task, level, params.grid_w, params.grid_h, Pos::new(1, 1))
}

pub(crate) fn interior_cells(state: &GridState) -> impl Iterator<Item = Pos> + '_ {
    (1..state.height - 1).flat_map(move |y| (1..state.width - 1).map(move |x| Pos::new(x, y)))
}

/// Interior cells with empty terrain, no object and nobody standing there.
pub(crate) fn vacant_cells(state: &GridState) -> Vec<Pos> {
    interior_cells(state)
        .filter(|p| {
            let i = state.idx(*p);
            state.terrain[i] == Terrain::Empty && state.objects[i] == ObjectKind::None && state.agents[i] == 0
        })
        .collect()
}

pub(crate) fn take_vacant(state: &GridState, rng: &mut StreamRng) -> Option<Pos> {
    rng.choose(&vacant_cells(state)).copied()
}

/// Breadth-first distances over walkable cells (`None` when unreachable).
pub(crate) fn distances(state: &GridState, from: Pos) -> Vec<Option<u32>> {
    let mut dist = vec![None; state.cell_count()];
    let mut queue = VecDeque::new();
    dist[state.idx(from)] = Some(0);
    queue.push_back(from);
    while let Some(p) = queue.pop_front() {
        let d = dist[state.idx(p)].unwrap();
        for dir in Direction::ALL {
            let q = p.step(dir);
            if state.is_walkable(q) && dist[state.idx(q)].is_none() {
                dist[state.idx(q)] = Some(d + 1);
                queue.push_back(q);
            }
        }
    }
    dist
}

/// Number of non-wall interior cells reachable from `from` treating only walls as blocking.
fn open_component_size(state: &GridState, from: Pos) -> usize {
    let mut seen = vec![false; state.cell_count()];
    let mut queue = VecDeque::from([from]);
    seen[state.idx(from)] = true;
    let mut count = 0;
    while let Some(p) = queue.pop_front() {
        count += 1;
        for dir in Direction::ALL {
            let q = p.step(dir);
            if state.in_bounds(q) && state.terrain_at(q) != Terrain::Wall && !seen[state.idx(q)] {
                seen[state.idx(q)] = true;
                queue.push_back(q);
            }
        }
    }
    count
}

/// Turn up to `count` vacant cells into walls while keeping the open area connected.
pub(crate) fn scatter_walls(state: &mut GridState, rng: &mut StreamRng, count: u32) {
    let mut open = interior_cells(state).filter(|p| state.terrain_at(*p) != Terrain::Wall).count();
    let mut placed = 0;
    let mut candidates = vacant_cells(state);
    rng.shuffle(&mut candidates);
    for p in candidates {
        if placed == count {
            break;
        }
        state.set_terrain(p, Terrain::Wall);
        let anchor = state.agent.position;
        if open_component_size(state, anchor) == open - 1 {
            open -= 1;
            placed += 1;
        } else {
            state.set_terrain(p, Terrain::Empty);
        }
    }
}

/// Place the agent on a random vacant cell and orient it north.
pub(crate) fn place_agent_randomly(state: &mut GridState, rng: &mut StreamRng) -> Option<Pos> {
    let p = take_vacant(state, rng)?;
    state.move_agent(p);
    state.agent.orientation = Direction::North;
    Some(p)
}

/// Vacant cell whose walking distance from the agent is at least `min_dist`.
pub(crate) fn far_vacant_cell(state: &GridState, rng: &mut StreamRng, min_dist: u32) -> Option<Pos> {
    let dist = distances(state, state.agent.position);
    let cells: Vec<Pos> = vacant_cells(state)
        .into_iter()
        .filter(|p| dist[state.idx(*p)].is_some_and(|d| d >= min_dist))
        .collect();
    rng.choose(&cells).copied()
}
