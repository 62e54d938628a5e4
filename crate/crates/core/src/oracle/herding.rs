//! Herding planner: pick the sheep with the cheapest push route into the
//! pen, walk to the cell behind it without brushing other sheep, repeat.

use std::collections::VecDeque;

use crate::grid::{Action, Direction, GridState, Pos};
use crate::nav;
use crate::tasks::herding::{in_pasture, in_pen};
use crate::tasks::tag_hunt::entity_can_enter;

fn sheep_cells(state: &GridState) -> Vec<Pos> {
    state.entities.iter().map(|e| e.position).collect()
}

fn near_any(p: Pos, others: &[Pos]) -> bool {
    others.iter().any(|o| o.is_adjacent(p))
}

/// First push direction of the best route for the sheep at `from`, with the route length.
fn push_route(state: &GridState, from: Pos, others: &[Pos]) -> Option<(Direction, usize)> {
    let n = state.cell_count();
    let mut prev: Vec<Option<(Pos, Direction)>> = vec![None; n];
    let mut dist: Vec<Option<usize>> = vec![None; n];
    dist[state.idx(from)] = Some(0);
    let mut queue = VecDeque::from([from]);
    let free = |p: Pos| p == from || (entity_can_enter(state, p) && !others.contains(&p));
    while let Some(c) = queue.pop_front() {
        for d in Direction::ALL {
            let to = c.step(d);
            let stand = c.step(d.opposite());
            if !in_pasture(state, to) || !free(to) || dist[state.idx(to)].is_some() {
                continue;
            }
            let agent_ok = state.in_bounds(stand)
                && (stand == state.agent.position || state.is_walkable(stand) || stand == from)
                && !others.contains(&stand)
                && !near_any(stand, others);
            if !agent_ok {
                continue;
            }
            dist[state.idx(to)] = Some(dist[state.idx(c)].unwrap() + 1);
            prev[state.idx(to)] = Some((c, d));
            queue.push_back(to);
        }
    }
    let pen_free_neighbors = |p: Pos| {
        Direction::ALL.iter().filter(|d| {
            let q = p.step(**d);
            in_pen(state, q) && !others.contains(&q)
        }).count()
    };
    let goal = (0..n)
        .map(|i| state.pos_of(i))
        .filter(|p| *p != from && in_pen(state, *p) && dist[state.idx(*p)].is_some())
        .min_by_key(|p| (pen_free_neighbors(*p), dist[state.idx(*p)].unwrap(), p.y, p.x))?;
    let len = dist[state.idx(goal)].unwrap();
    let mut cur = goal;
    let mut first = None;
    while let Some((c, d)) = prev[state.idx(cur)] {
        first = Some(d);
        cur = c;
    }
    first.map(|d| (d, len))
}

pub fn next_action(state: &GridState) -> Action {
    let sheep = sheep_cells(state);
    let mut best: Option<(usize, Action)> = None;
    for (i, &s) in sheep.iter().enumerate() {
        if in_pen(state, s) {
            continue;
        }
        let others: Vec<Pos> = sheep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p).collect();
        let Some((d, pushes)) = push_route(state, s, &others) else {
            continue;
        };
        let stand = s.step(d.opposite());
        let walk = nav::walk_path(state, state.agent.position, stand, |q| {
            state.is_walkable(q) && (q == stand || !sheep.iter().any(|x| x.is_adjacent(q)))
        });
        let Some(walk) = walk else {
            continue;
        };
        let cost = walk.len() + pushes;
        let action = walk.first().map_or(Action::Noop, |d| d.move_action());
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, action));
        }
    }
    best.map_or(Action::Noop, |(_, a)| a)
}
