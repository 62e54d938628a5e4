//! Transition function: movement, generic interactions, task hook, rewards.

use super::{meta, Action, Color, Direction, GridState, Item, ObjectKind, Outcome, Pos, Terrain};
use crate::error::EnvError;
use crate::tasks::{Event, RewardMode};

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub reward: f64,
    pub outcome: Outcome,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveOutcome {
    Moved,
    Pushed,
    /// Bumped into an interactable blocker; only the orientation changed.
    Turned,
    Blocked,
}

/// Cell the agent is facing.
pub fn faced_cell(state: &GridState) -> Pos {
    state.agent.position.step(state.agent.orientation)
}

fn push_destination_free(state: &GridState, p: Pos) -> bool {
    state.in_bounds(p)
        && state.terrain_at(p) != Terrain::Wall
        && matches!(state.object_at(p), ObjectKind::None | ObjectKind::Target)
        && state.agents[state.idx(p)] == 0
}

/// Whether `p` holds something `interact` acts on while it is faced.
pub(crate) fn faced_interactable(state: &GridState, p: Pos) -> bool {
    if !state.in_bounds(p) {
        return false;
    }
    let i = state.idx(p);
    match state.objects[i] {
        ObjectKind::Key | ObjectKind::Light => return true,
        ObjectKind::Door if state.metadata[i] & meta::ACTIVE == 0 => return true,
        _ => {}
    }
    matches!(state.entity_at(p), Some(e) if e.kind == super::EntityKind::Quarry)
}

/// Blocking cells a move turns the agent toward instead of being a wall bump.
fn turnable_blocker(state: &GridState, p: Pos) -> bool {
    if !state.in_bounds(p) {
        return false;
    }
    let i = state.idx(p);
    match state.objects[i] {
        ObjectKind::Light => true,
        ObjectKind::Door => state.metadata[i] & meta::ACTIVE == 0,
        _ => matches!(state.entity_at(p), Some(e) if e.kind == super::EntityKind::Quarry),
    }
}

fn can_push(state: &GridState, dest: Pos, dir: Direction) -> bool {
    state.in_bounds(dest)
        && state.object_at(dest) == ObjectKind::Box
        && state.agents[state.idx(dest)] == 0
        && push_destination_free(state, dest.step(dir))
}

/// Resolve a movement action, ignoring task dynamics.
pub fn apply_move(state: &mut GridState, dir: Direction, events: &mut Vec<Event>) -> MoveOutcome {
    let dest = state.agent.position.step(dir);
    if state.is_walkable(dest) {
        state.move_agent(dest);
        state.agent.orientation = dir;
        return MoveOutcome::Moved;
    }
    if can_push(state, dest, dir) {
        let beyond = dest.step(dir);
        let di = state.idx(dest);
        let bi = state.idx(beyond);
        let box_meta = state.metadata[di];
        let target_left = box_meta & meta::TARGET_UNDER != 0;
        let target_there = state.objects[bi] == ObjectKind::Target;
        let (rest_kind, rest_meta) = if target_left { (ObjectKind::Target, 0) } else { (ObjectKind::None, 0) };
        state.objects[di] = rest_kind;
        state.metadata[di] = rest_meta;
        state.objects[bi] = ObjectKind::Box;
        state.metadata[bi] = (box_meta & !meta::TARGET_UNDER) | if target_there { meta::TARGET_UNDER } else { 0 };
        if target_there {
            events.push(Event::BoxOnTarget);
        }
        state.move_agent(dest);
        state.agent.orientation = dir;
        return MoveOutcome::Pushed;
    }
    if turnable_blocker(state, dest) {
        state.agent.orientation = dir;
        return MoveOutcome::Turned;
    }
    MoveOutcome::Blocked
}

fn generic_interact(state: &mut GridState, events: &mut Vec<Event>) {
    let p = faced_cell(state);
    if !state.in_bounds(p) {
        return;
    }
    let i = state.idx(p);
    match state.objects[i] {
        ObjectKind::Key => {
            let color = meta::color(state.metadata[i]);
            state.objects[i] = ObjectKind::None;
            state.metadata[i] = 0;
            state.agent.inventory.push(Item { kind: ObjectKind::Key, color });
            events.push(Event::KeyPickup);
        }
        ObjectKind::Door if state.metadata[i] & meta::ACTIVE == 0 => {
            let color = meta::color(state.metadata[i]);
            let held = state
                .agent
                .inventory
                .iter()
                .position(|it| it.kind == ObjectKind::Key && it.color == color && color != Color::None);
            if let Some(slot) = held {
                state.agent.inventory.remove(slot);
                state.metadata[i] |= meta::ACTIVE;
                events.push(Event::DoorOpen);
            }
        }
        _ => {}
    }
}

/// Advance the episode by one action.
pub fn step_env(state: &mut GridState, action: Action) -> Result<StepResult, EnvError> {
    if state.outcome.is_terminal() {
        return Err(EnvError::EpisodeFinished);
    }
    let rules = state.task.rules();
    let mut events = Vec::new();
    if !rules.agent_frozen(state) {
        match action {
            Action::Noop => {}
            Action::Interact => {
                if !rules.interact(state, &mut events) {
                    generic_interact(state, &mut events);
                }
            }
            mv => {
                let dir = mv.direction().expect("move action");
                apply_move(state, dir, &mut events);
            }
        }
    }
    rules.dynamics(state, action, &mut events);

    let mut outcome = rules.outcome(state);
    let schedule = state.task.spec().reward_schedule;
    let mut reward = 0.0;
    if state.reward_mode == RewardMode::Dense {
        reward += schedule.step_penalty;
        reward += events.iter().map(|e| schedule.bonus(*e)).sum::<f64>();
    }
    match outcome {
        Outcome::Success => reward += schedule.success_reward,
        Outcome::Failure => reward += schedule.failure_reward,
        _ => {}
    }
    state.step_count += 1;
    if outcome == Outcome::Running && state.step_count >= state.max_steps {
        outcome = Outcome::Truncated;
    }
    state.outcome = outcome;
    state.cumulative_reward += reward;
    Ok(StepResult { reward, outcome, events })
}

/// Action codes whose execution is not a wall bump, in ascending order.
pub fn valid_actions_of(state: &GridState) -> Vec<Action> {
    let mut out = vec![Action::Noop];
    for dir in Direction::ALL {
        let dest = state.agent.position.step(dir);
        if state.is_walkable(dest) || can_push(state, dest, dir) || turnable_blocker(state, dest) {
            out.push(dir.move_action());
        }
    }
    let rules = state.task.rules();
    if faced_interactable(state, faced_cell(state)) || rules.interact_available(state) {
        out.push(Action::Interact);
    }
    out
}
