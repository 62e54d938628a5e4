//! Hand-authored states with known answers.

use crate::grid::{Color, GridState, ObjectKind, Pos, Terrain};
use crate::rng::StreamRng;
use crate::tasks::{Difficulty, TaskId};

/// Open cells of the three-room KeyDoor fixture; everything else inside the
/// 11x11 boundary is wall except the two door cells.
fn fixture_open(p: Pos) -> bool {
    let room_a = (1..=2).contains(&p.x) && (1..=7).contains(&p.y);
    let room_b = (4..=6).contains(&p.x) && (3..=7).contains(&p.y);
    let alcove = (5..=6).contains(&p.x) && (8..=9).contains(&p.y);
    let room_c = (8..=9).contains(&p.x) && (3..=7).contains(&p.y);
    room_a || room_b || alcove || room_c
}

/// The 11x11 KeyDoor layout: gold key at (1,3), gold door at (3,5), red key
/// at (5,6), red door at (7,7), goal at (9,7), agent at (1,4) facing north.
///
/// ```
/// use gridbench::{fixtures::key_door_fixture, ApiView};
///
/// let state = key_door_fixture();
/// let api = ApiView::new(&state);
/// assert_eq!(api.get_walkable_cells().len(), 43);
/// assert_eq!(api.distance_to(1, 3).unwrap(), 1);
/// ```
pub fn key_door_fixture() -> GridState {
    let mut s = GridState::empty_room(TaskId::KeyDoorPuzzle, Difficulty::Medium, 11, 11, Pos::new(1, 4));
    for y in 1..10 {
        for x in 1..10 {
            let p = Pos::new(x, y);
            if !fixture_open(p) {
                s.set_terrain(p, Terrain::Wall);
            }
        }
    }
    for (p, kind, color) in [
        (Pos::new(1, 3), ObjectKind::Key, Color::Gold),
        (Pos::new(3, 5), ObjectKind::Door, Color::Gold),
        (Pos::new(5, 6), ObjectKind::Key, Color::Red),
        (Pos::new(7, 7), ObjectKind::Door, Color::Red),
    ] {
        s.set_terrain(p, Terrain::Empty);
        s.set_object(p, kind, color as u16);
    }
    s.set_object(Pos::new(9, 7), ObjectKind::Goal, 0);
    s.seed = 42;
    s.rng = StreamRng::new(42);
    s.max_steps = 200;
    s
}
