use super::layout::{open_room, vacant_cells};
use super::{agent_on_goal, Difficulty, DifficultyParams, TaskId, TaskRules};
use crate::grid::{meta, Color, GridState, ObjectKind, Outcome, Pos, Terrain};
use crate::rng::StreamRng;

/// A row of rooms separated by wall columns, each pierced by one locked door.
/// The key for door `i` lies in room `i`, or with backtracking in any room
/// `0..=i`. The agent starts in room 0 and the goal sits in the last room.
pub(crate) struct KeyDoorPuzzle;

impl TaskRules for KeyDoorPuzzle {
    fn generate(&self, params: &DifficultyParams, level: Difficulty, rng: &mut StreamRng) -> Option<GridState> {
        let mut s = open_room(TaskId::KeyDoorPuzzle, level, params);
        let pairs = params.objects("door") as usize;
        let rooms = pairs + 1;
        let inner = (params.grid_w - 2) as usize;
        let spare = inner.checked_sub(pairs + 2 * rooms)?;
        let mut widths = vec![2usize; rooms];
        for _ in 0..spare {
            let r = rng.index(rooms);
            widths[r] += 1;
        }
        // Column spans of each room and the wall column after it.
        let mut spans = Vec::with_capacity(rooms);
        let mut x = 1;
        for (r, w) in widths.iter().enumerate() {
            spans.push((x, x + *w as i32 - 1));
            x += *w as i32;
            if r < pairs {
                for y in 1..params.grid_h - 1 {
                    s.set_terrain(Pos::new(x, y), Terrain::Wall);
                }
                let door_y = 1 + rng.below((params.grid_h - 2) as u64) as i32;
                s.set_terrain(Pos::new(x, door_y), Terrain::Empty);
                s.set_object(Pos::new(x, door_y), ObjectKind::Door, Color::KEYED[r] as u16);
                x += 1;
            }
        }
        let in_room = |p: &Pos, r: usize| p.x >= spans[r].0 && p.x <= spans[r].1;
        let pick_in = |s: &GridState, rng: &mut StreamRng, r: usize| -> Option<Pos> {
            let cells: Vec<Pos> = vacant_cells(s).into_iter().filter(|p| in_room(p, r)).collect();
            rng.choose(&cells).copied()
        };
        let agent = pick_in(&s, rng, 0)?;
        s.move_agent(agent);
        let backtracking = params.get("backtracking") > 0.0;
        for (i, color) in Color::KEYED.iter().take(pairs).enumerate() {
            let room = if backtracking { rng.index(i + 1) } else { i };
            let p = pick_in(&s, rng, room)?;
            s.set_object(p, ObjectKind::Key, *color as u16);
        }
        let goal = pick_in(&s, rng, rooms - 1)?;
        s.set_object(goal, ObjectKind::Goal, 0);
        debug_assert!(s.positions_of(ObjectKind::Door).iter().all(|d| s.meta_at(*d) & meta::ACTIVE == 0));
        Some(s)
    }

    fn outcome(&self, state: &GridState) -> Outcome {
        agent_on_goal(state)
    }
}
