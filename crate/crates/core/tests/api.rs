mod common;

use gridbench::fixtures::key_door_fixture;
use gridbench::{reset_env, Action, ApiView, Difficulty, Env, Pos, TaskId};

#[test]
fn fixture_matches_published_api_values() {
    let s = key_door_fixture();
    let api = ApiView::new(&s);
    assert_eq!(api.distance_to(1, 3).unwrap(), 1);
    assert_eq!(api.direction_to(1, 3).unwrap(), "north");
    assert!(api.is_adjacent(1, 3).unwrap());
    let goal = api.get_nearest("goal").unwrap().unwrap();
    assert_eq!((goal.position, goal.distance), (Pos::new(9, 7), 11));
    assert_eq!(api.get_entity_at(3, 5).unwrap().unwrap().kind, "door");
    assert!(!api.is_walkable(3, 4).unwrap());
    assert!(!api.is_reachable(9, 7).unwrap());
    assert_eq!(api.get_walkable_cells().len(), 43);
    assert_eq!(api.get_walkable_cells()[..2], [Pos::new(1, 1), Pos::new(1, 2)]);
    assert_eq!(api.neighbors(1, 4).unwrap(), vec![Pos::new(1, 3), Pos::new(2, 4), Pos::new(1, 5)]);
    assert_eq!(api.path_to(1, 3).unwrap(), Some(vec![Action::MoveUp]));
    assert_eq!(api.path_to(1, 4).unwrap(), Some(vec![]));
    assert_eq!(api.go_to_nearest("key").unwrap(), Some(vec![Action::MoveUp]));
    assert_eq!(api.interact_with(1, 3).unwrap(), Some(vec![Action::Interact]));
    assert!(!api.has_in_inventory("key").unwrap());
    assert_eq!(api.action_name_to_int("move_up").unwrap(), 1);
    let c = api.counters();
    assert_eq!((c.current_step, c.max_steps, c.total_reward, c.is_done), (0, 200, 0.0, false));
    let valid: Vec<u8> = gridbench::valid_actions_of(&s).iter().map(|a| a.code()).collect();
    assert_eq!(valid, vec![0, 1, 2, 4, 5]);
    let content = api.cell_content(3, 5).unwrap();
    assert_eq!(serde_json::to_value(content).unwrap()["terrain"], "empty");
}

#[test]
fn pickup_then_has_key() {
    let mut env = Env::from_state(key_door_fixture());
    let plan = ApiView::new(env.state()).pickup_nearest("key").unwrap().unwrap();
    for a in plan {
        env.act(a).unwrap();
    }
    assert!(ApiView::new(env.state()).has_in_inventory("key").unwrap());
}

#[test]
fn move_toward_walled_off_goal_is_noop() {
    let s = key_door_fixture();
    assert_eq!(ApiView::new(&s).move_toward(9, 7).unwrap(), Action::Noop);
}

#[test]
fn flee_from_own_cell_always_moves() {
    let s = reset_env(TaskId::GoToGoal, Difficulty::Expert, 5).unwrap();
    let p = s.agent.position;
    assert_ne!(ApiView::new(&s).flee_from(p.x, p.y).unwrap(), Action::Noop);
}

#[test]
fn path_to_matches_brute_force_on_generated_layouts() {
    assert!(common::check_pathfinding(240, 2024) > 10_000);
}
