use std::collections::VecDeque;

use super::layout::{open_room, place_agent_randomly, scatter_walls, take_vacant};
use super::{Difficulty, DifficultyParams, TaskId, TaskRules};
use crate::grid::{meta, Direction, GridState, ObjectKind, Outcome, Pos};
use crate::rng::StreamRng;

/// Boxes start on their targets and are scrambled by random reverse moves
/// (the agent pulls a box one cell toward itself), so every emitted layout is
/// solvable by replaying the pulls as pushes.
pub(crate) struct SokobanPush;

fn free_for_box(s: &GridState, p: Pos) -> bool {
    s.is_walkable(p) && s.object_at(p) != ObjectKind::Box
}

fn agent_reach(s: &GridState) -> Vec<bool> {
    let mut seen = vec![false; s.cell_count()];
    let start = s.agent.position;
    seen[s.idx(start)] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for d in Direction::ALL {
            let q = p.step(d);
            if s.is_walkable(q) && !seen[s.idx(q)] {
                seen[s.idx(q)] = true;
                queue.push_back(q);
            }
        }
    }
    seen
}

/// Move the box at `from` one cell to `to`, keeping the target marker in place.
fn relocate_box(s: &mut GridState, from: Pos, to: Pos) {
    let under = s.meta_at(from) & meta::TARGET_UNDER != 0;
    s.set_object(from, if under { ObjectKind::Target } else { ObjectKind::None }, 0);
    let onto = s.object_at(to) == ObjectKind::Target;
    s.set_object(to, ObjectKind::Box, if onto { meta::TARGET_UNDER } else { 0 });
}

impl TaskRules for SokobanPush {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let mut s = open_room(TaskId::SokobanPush, level, params);
        scatter_walls(&mut s, rng, params.objects("clutter"));
        let n = params.objects("box");
        for _ in 0..n {
            let p = take_vacant(&s, rng)?;
            s.set_object(p, ObjectKind::Box, meta::TARGET_UNDER);
        }
        place_agent_randomly(&mut s, rng)?;
        let pulls = params.get("scramble_pulls") as u32 * n;
        for _ in 0..pulls {
            let reach = agent_reach(&s);
            let mut moves = Vec::new();
            for b in s.positions_of(ObjectKind::Box) {
                for d in Direction::ALL {
                    // Agent stands at b+d, pulls the box to b+d and steps back to b+2d.
                    let stand = b.step(d);
                    let back = stand.step(d);
                    if free_for_box(&s, stand) && reach[s.idx(stand)] && free_for_box(&s, back) {
                        moves.push((b, stand, back));
                    }
                }
            }
            let Some(&(b, stand, back)) = rng.choose(&moves) else { break };
            relocate_box(&mut s, b, stand);
            s.move_agent(back);
        }
        if s.positions_of(ObjectKind::Target).is_empty() {
            return None;
        }
        s.agent.orientation = Direction::North;
        Some(s)
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        if state.objects.contains(&ObjectKind::Target) {
            Outcome::Running
        } else {
            Outcome::Success
        }
    }
}
