use super::layout::{distances, interior_cells, open_room};
use super::{agent_on_goal, Difficulty, DifficultyParams, TaskId, TaskRules};
use crate::grid::{Direction, GridState, ObjectKind, Outcome, Pos, Terrain};
use crate::rng::StreamRng;

pub(crate) struct MazeNavigation;

/// Carve a perfect maze with an iterative recursive backtracker over odd cells.
fn carve(state: &mut GridState, rng: &mut StreamRng) {
    for p in interior_cells(&state.clone()) {
        state.set_terrain(p, Terrain::Wall);
    }
    let start = Pos::new(1, 1);
    state.set_terrain(start, Terrain::Empty);
    let mut stack = vec![start];
    while let Some(&cur) = stack.last() {
        let mut options: Vec<Direction> = Direction::ALL
            .into_iter()
            .filter(|d| {
                let next = cur.step(*d).step(*d);
                state.interior(next) && state.terrain_at(next) == Terrain::Wall
            })
            .collect();
        if options.is_empty() {
            stack.pop();
            continue;
        }
        rng.shuffle(&mut options);
        let d = options[0];
        let wall = cur.step(d);
        let next = wall.step(d);
        state.set_terrain(wall, Terrain::Empty);
        state.set_terrain(next, Terrain::Empty);
        stack.push(next);
    }
}

impl TaskRules for MazeNavigation {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let mut s = open_room(TaskId::MazeNavigation, level, params);
        carve(&mut s, rng);
        let corridors: Vec<Pos> = interior_cells(&s).filter(|p| s.terrain_at(*p) == Terrain::Empty).collect();
        let agent = *rng.choose(&corridors)?;
        s.move_agent(agent);
        let min_dist = ((params.grid_w + params.grid_h) / 2) as u32;
        let dist = distances(&s, agent);
        let far: Vec<Pos> =
            corridors.into_iter().filter(|p| dist[s.idx(*p)].is_some_and(|d| d >= min_dist)).collect();
        let goal = *rng.choose(&far)?;
        s.set_object(goal, ObjectKind::Goal, 0);
        Some(s)
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        agent_on_goal(state)
    }
}
