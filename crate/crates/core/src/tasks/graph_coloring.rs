use super::layout::{open_room, place_agent_randomly};
use super::{Difficulty, DifficultyParams, Event, TaskId, TaskRules};
use crate::grid::{meta, GridState, ObjectKind, Outcome, Pos};
use crate::rng::StreamRng;

/// Nodes sit on a lattice with spacing 3 and are joined by drawn edge cells
/// (orthogonal or diagonal lattice neighbors). Standing on a node and
/// interacting cycles its color through the palette `1..=k`.
///
/// `task_vars = [k, m, (x, y) * m, e, (a, b) * e]`.
pub(crate) struct GraphColoring;

const SPACING: i32 = 3;

/// `(palette size, node positions, edges as node index pairs)`.
pub fn graph_edges(state: &GridState) -> (u8, Vec<Pos>, Vec<(usize, usize)>) {
    let v = &state.task_vars;
    if v.len() < 2 {
        return (0, Vec::new(), Vec::new());
    }
    let k = v[0] as u8;
    let m = v[1] as usize;
    let nodes = (0..m).map(|i| Pos::new(v[2 + 2 * i], v[3 + 2 * i])).collect();
    let base = 2 + 2 * m;
    let e = v[base] as usize;
    let edges = (0..e).map(|j| (v[base + 1 + 2 * j] as usize, v[base + 2 + 2 * j] as usize)).collect();
    (k, nodes, edges)
}

/// Node's current palette index (0 = uncolored).
pub(crate) fn node_color(state: &GridState, p: Pos) -> u8 {
    meta::palette(state.meta_at(p))
}

impl TaskRules for GraphColoring {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let mut s = open_room(TaskId::GraphColoring, level, params);
        let k = params.get("chromatic_number") as u8;
        let m = params.objects("node") as usize;
        let lattice: Vec<i32> = (0..).map(|i| 1 + SPACING * i).take_while(|c| *c <= params.grid_w - 2).collect();
        let side = lattice.len() as i32;
        if (side * side) < m as i32 {
            return None;
        }
        let lattice_neighbor = |a: (i32, i32), b: (i32, i32)| {
            let (dx, dy) = ((a.0 - b.0).abs(), (a.1 - b.1).abs());
            dx <= 1 && dy <= 1 && (dx, dy) != (0, 0)
        };
        // Grow a connected node set, coloring each new node differently from its parent.
        let mut chosen: Vec<(i32, i32)> = vec![(rng.below(side as u64) as i32, rng.below(side as u64) as i32)];
        let mut hidden: Vec<u8> = vec![1 + rng.below(k as u64) as u8];
        let mut edges: Vec<(usize, usize)> = Vec::new();
        while chosen.len() < m {
            let mut frontier = Vec::new();
            for (pi, p) in chosen.iter().enumerate() {
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        let q = (p.0 + dx, p.1 + dy);
                        if (dx, dy) != (0, 0)
                            && q.0 >= 0
                            && q.1 >= 0
                            && q.0 < side
                            && q.1 < side
                            && !chosen.contains(&q)
                        {
                            frontier.push((pi, q));
                        }
                    }
                }
            }
            let &(parent, q) = rng.choose(&frontier)?;
            let mut color = 1 + rng.below(k as u64 - 1) as u8;
            if color >= hidden[parent] {
                color += 1;
            }
            chosen.push(q);
            hidden.push(color);
            edges.push((parent, chosen.len() - 1));
        }
        let rate = params.get("extra_edge_rate");
        for a in 0..m {
            for b in a + 1..m {
                if lattice_neighbor(chosen[a], chosen[b])
                    && hidden[a] != hidden[b]
                    && !edges.contains(&(a, b))
                    && !edges.contains(&(b, a))
                    && rng.chance(rate)
                {
                    edges.push((a, b));
                }
            }
        }
        // Two diagonals of one lattice square would visually cross; keep the first.
        let mut kept: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            let (pa, pb) = (chosen[a], chosen[b]);
            let diagonal = (pa.0 - pb.0).abs() == 1 && (pa.1 - pb.1).abs() == 1;
            let crosses = diagonal
                && kept.iter().any(|(c, d)| {
                    let (pc, pd) = (chosen[*c], chosen[*d]);
                    (pc.0 - pd.0).abs() == 1
                        && (pc.1 - pd.1).abs() == 1
                        && pa.0.min(pb.0) == pc.0.min(pd.0)
                        && pa.1.min(pb.1) == pc.1.min(pd.1)
                });
            if !crosses {
                kept.push((a, b));
            }
        }
        let to_pos = |c: (i32, i32)| Pos::new(lattice[c.0 as usize], lattice[c.1 as usize]);
        let nodes: Vec<Pos> = chosen.iter().map(|c| to_pos(*c)).collect();
        for (a, b) in &kept {
            let (pa, pb) = (nodes[*a], nodes[*b]);
            let (sx, sy) = ((pb.x - pa.x).signum(), (pb.y - pa.y).signum());
            for t in 1..SPACING {
                s.set_object(Pos::new(pa.x + sx * t, pa.y + sy * t), ObjectKind::Edge, 0);
            }
        }
        for p in &nodes {
            s.set_object(*p, ObjectKind::Node, 0);
        }
        let mut vars = vec![k as i32, m as i32];
        vars.extend(nodes.iter().flat_map(|p| [p.x, p.y]));
        vars.push(kept.len() as i32);
        vars.extend(kept.iter().flat_map(|(a, b)| [*a as i32, *b as i32]));
        s.task_vars = vars;
        place_agent_randomly(&mut s, rng)?;
        Some(s)
    }

    fn interact(&self, state: &mut GridState, events: &mut Vec<Event>) -> bool {
        let here = state.agent.position;
        if state.object_at(here) != ObjectKind::Node {
            return false;
        }
        let k = state.task_vars[0] as u8;
        let next = node_color(state, here) % k + 1;
        let i = state.idx(here);
        state.metadata[i] = meta::with_palette(state.metadata[i], next);
        events.push(Event::NodeRecolored);
        true
    }

    fn interact_available(&self, state: &GridState) -> bool {
        state.object_at(state.agent.position) == ObjectKind::Node
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        let (_, nodes, edges) = graph_edges(state);
        let colors: Vec<u8> = nodes.iter().map(|p| node_color(state, *p)).collect();
        let complete = colors.iter().all(|c| *c != 0);
        let proper = edges.iter().all(|(a, b)| colors[*a] != colors[*b]);
        if complete && proper {
            Outcome::Success
        } else {
            Outcome::Running
        }
    }
}
