//! Push-sequence search: A* over box configurations with the agent's
//! reachable region as part of the state, pruning boxes pushed onto cells
//! from which no target can ever be reached.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use crate::grid::{meta, Action, Direction, GridState, ObjectKind, Pos};
use crate::nav;

/// Expanded-node budget before the search gives up.
pub const NODE_LIMIT: usize = 200_000;

struct Board<'a> {
    state: &'a GridState,
    blocked: Vec<bool>,
    target: Vec<bool>,
    live: Vec<bool>,
}

impl<'a> Board<'a> {
    fn new(state: &'a GridState) -> Self {
        let n = state.cell_count();
        let mut blocked = vec![false; n];
        let mut target = vec![false; n];
        for i in 0..n {
            let p = state.pos_of(i);
            let kind = state.objects[i];
            blocked[i] = !state.is_walkable(p) && kind != ObjectKind::Box;
            target[i] = kind == ObjectKind::Target || (kind == ObjectKind::Box && state.metadata[i] & meta::TARGET_UNDER != 0);
        }
        let mut board = Board { state, blocked, target, live: vec![false; n] };
        board.live = board.live_cells();
        board
    }

    fn open(&self, p: Pos) -> bool {
        self.state.in_bounds(p) && !self.blocked[self.state.idx(p)]
    }

    /// Cells from which a lone box can still be pushed onto some target.
    fn live_cells(&self) -> Vec<bool> {
        let s = self.state;
        let mut live = self.target.clone();
        let mut queue: VecDeque<Pos> = (0..s.cell_count()).filter(|i| live[*i]).map(|i| s.pos_of(i)).collect();
        while let Some(t) = queue.pop_front() {
            for d in Direction::ALL {
                let from = t.step(d.opposite());
                let stand = from.step(d.opposite());
                if self.open(from) && self.open(stand) && !live[s.idx(from)] {
                    live[s.idx(from)] = true;
                    queue.push_back(from);
                }
            }
        }
        live
    }

    fn reach(&self, agent: Pos, boxes: &[u16]) -> Vec<bool> {
        let s = self.state;
        let mut seen = vec![false; s.cell_count()];
        for b in boxes {
            seen[*b as usize] = true;
        }
        let mut out = vec![false; s.cell_count()];
        out[s.idx(agent)] = true;
        seen[s.idx(agent)] = true;
        let mut queue = VecDeque::from([agent]);
        while let Some(p) = queue.pop_front() {
            for d in Direction::ALL {
                let q = p.step(d);
                if self.open(q) && !seen[s.idx(q)] {
                    seen[s.idx(q)] = true;
                    out[s.idx(q)] = true;
                    queue.push_back(q);
                }
            }
        }
        out
    }

    fn heuristic(&self, boxes: &[u16]) -> u32 {
        let targets: Vec<Pos> = (0..self.state.cell_count()).filter(|i| self.target[*i]).map(|i| self.state.pos_of(i)).collect();
        boxes
            .iter()
            .map(|b| {
                let p = self.state.pos_of(*b as usize);
                targets.iter().map(|t| t.manhattan(p)).min().unwrap_or(0)
            })
            .sum()
    }
}

type Key = (Vec<u16>, u16);

/// Push plan as `(box cell, direction)` pairs in order.
pub fn solve_pushes(state: &GridState) -> Option<Vec<(Pos, Direction)>> {
    let board = Board::new(state);
    let s = state;
    let mut boxes: Vec<u16> = s.positions_of(ObjectKind::Box).iter().map(|p| s.idx(*p) as u16).collect();
    boxes.sort_unstable();
    let region_id = |reach: &[bool]| reach.iter().position(|r| *r).unwrap_or(0) as u16;
    let start_reach = board.reach(s.agent.position, &boxes);
    let start: Key = (boxes.clone(), region_id(&start_reach));
    let mut parent: HashMap<Key, Option<(Key, Pos, Direction)>> = HashMap::new();
    let mut agent_at: HashMap<Key, Pos> = HashMap::new();
    parent.insert(start.clone(), None);
    agent_at.insert(start.clone(), s.agent.position);
    let mut heap = BinaryHeap::new();
    let mut order = 0u64;
    heap.push(Reverse((board.heuristic(&boxes), 0u32, order, start.clone())));
    let mut expanded = 0;
    while let Some(Reverse((_, g, _, key))) = heap.pop() {
        if key.0.iter().all(|b| board.target[*b as usize]) {
            let mut pushes = Vec::new();
            let mut cur = key;
            while let Some(Some((prev, b, d))) = parent.get(&cur).cloned() {
                pushes.push((b, d));
                cur = prev;
            }
            pushes.reverse();
            return Some(pushes);
        }
        expanded += 1;
        if expanded > NODE_LIMIT {
            return None;
        }
        let agent = agent_at[&key];
        let reach = board.reach(agent, &key.0);
        for (k, &b) in key.0.iter().enumerate() {
            let bp = s.pos_of(b as usize);
            for d in Direction::ALL {
                let stand = bp.step(d.opposite());
                let to = bp.step(d);
                if !s.in_bounds(stand) || !reach[s.idx(stand)] || !board.open(to) {
                    continue;
                }
                let ti = s.idx(to) as u16;
                if !board.live[ti as usize] || key.0.contains(&ti) {
                    continue;
                }
                let mut next = key.0.clone();
                next[k] = ti;
                next.sort_unstable();
                let next_reach = board.reach(bp, &next);
                let next_key: Key = (next.clone(), region_id(&next_reach));
                if parent.contains_key(&next_key) {
                    continue;
                }
                parent.insert(next_key.clone(), Some((key.clone(), bp, d)));
                agent_at.insert(next_key.clone(), bp);
                order += 1;
                heap.push(Reverse((g + 1 + board.heuristic(&next), g + 1, order, next_key)));
            }
        }
    }
    None
}

/// Full action sequence: walk behind each box, then push.
pub fn solve(state: &GridState) -> Option<Vec<Action>> {
    let pushes = solve_pushes(state)?;
    let board = Board::new(state);
    let mut boxes: Vec<Pos> = state.positions_of(ObjectKind::Box);
    let mut agent = state.agent.position;
    let mut actions = Vec::new();
    for (b, d) in pushes {
        let stand = b.step(d.opposite());
        let walk = nav::walk_path(state, agent, stand, |q| board.open(q) && !boxes.contains(&q))?;
        actions.extend(walk.into_iter().map(Direction::move_action));
        actions.push(d.move_action());
        let slot = boxes.iter().position(|x| *x == b)?;
        boxes[slot] = b.step(d);
        agent = b;
    }
    Some(actions)
}
