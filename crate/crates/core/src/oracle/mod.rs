//! Scripted reference policies written against the coding API, plus the
//! uniform random baseline.

mod coloring;
mod herding;
mod lights;
mod sokoban;
mod timed;

use std::collections::VecDeque;

use serde::Serialize;

pub use coloring::{cheapest_coloring, presses_between};
pub use lights::solve_presses;
pub use sokoban::{solve as solve_sokoban, solve_pushes, NODE_LIMIT as SOKOBAN_NODE_LIMIT};

use crate::api::ApiView;
use crate::error::EnvError;
use crate::grid::{meta, step_env, Action, GridState, ObjectKind, Outcome, Pos};
use crate::nav;
use crate::rng::StreamRng;
use crate::env::reset_env;
use crate::tasks::{board_cells, board_size, flashing_tile, graph_edges, recalled_count, sequence_cells, Difficulty, TaskId};

#[derive(Debug, Clone, Default)]
enum Scratch {
    #[default]
    Empty,
    /// Lights still to press.
    Presses(Vec<Pos>),
    /// Target color per node.
    Coloring(Vec<u8>),
    /// Tiles in the order they flashed.
    Sequence(Vec<Pos>),
    /// Planning found nothing; keep idling.
    Stuck,
}

/// Per-episode oracle memory.
#[derive(Debug, Clone, Default)]
pub struct OracleState {
    pub action_queue: VecDeque<Action>,
    pub plan_epoch: u32,
    scratch: Scratch,
}

impl OracleState {
    pub fn new() -> Self {
        OracleState::default()
    }

    fn replan(&mut self, plan: Option<Vec<Action>>) {
        self.plan_epoch += 1;
        self.action_queue = plan.unwrap_or_default().into();
    }
}

/// Tasks whose world changes regardless of the plan; they replan every step.
fn replans_every_step(task: TaskId) -> bool {
    matches!(task, TaskId::TagHunt | TaskId::Herding)
}

/// Next oracle action for `state`.
pub fn oracle_act(state: &GridState, memory: &mut OracleState) -> Action {
    if state.outcome.is_terminal() {
        return Action::Noop;
    }
    let view = ApiView::new(state);
    match state.task {
        TaskId::SequenceMemory if state.task.rules().agent_frozen(state) => {
            if let Some(p) = flashing_tile(state) {
                let seq = match &mut memory.scratch {
                    Scratch::Sequence(seq) => seq,
                    other => {
                        *other = Scratch::Sequence(Vec::new());
                        let Scratch::Sequence(seq) = other else { unreachable!() };
                        seq
                    }
                };
                seq.push(p);
            }
            return Action::Noop;
        }
        TaskId::TagHunt => return tag_step(&view),
        TaskId::Herding => return herding::next_action(state),
        _ => {}
    }
    debug_assert!(!replans_every_step(state.task));
    if memory.action_queue.is_empty() {
        let plan = plan(state, &view, memory);
        memory.replan(plan);
    }
    memory.action_queue.pop_front().unwrap_or(Action::Noop)
}

fn plan(state: &GridState, view: &ApiView<'_>, memory: &mut OracleState) -> Option<Vec<Action>> {
    match state.task {
        TaskId::GoToGoal | TaskId::MazeNavigation | TaskId::FogOfWarExploration | TaskId::NoisyObservation => {
            view.go_to_nearest("goal").ok().flatten()
        }
        TaskId::DynamicObstacles => timed::plan(state),
        TaskId::KeyDoorPuzzle => key_door_plan(state, view),
        TaskId::SokobanPush => {
            if matches!(memory.scratch, Scratch::Stuck) {
                return None;
            }
            let plan = sokoban::solve(state);
            if plan.is_none() {
                memory.scratch = Scratch::Stuck;
            }
            plan
        }
        TaskId::LightsOut => lights_plan(state, view, memory),
        TaskId::GraphColoring => coloring_plan(state, view, memory),
        TaskId::SequenceMemory => sequence_plan(state, memory),
        TaskId::TagHunt | TaskId::Herding => None,
    }
}

/// Goal if reachable, else open a door we hold the key for, else fetch the nearest key.
fn key_door_plan(state: &GridState, view: &ApiView<'_>) -> Option<Vec<Action>> {
    if let Some(goal) = view.get_nearest("goal").ok().flatten() {
        if let Some(path) = view.path_to(goal.position.x, goal.position.y).ok().flatten() {
            return Some(path);
        }
    }
    let held: Vec<_> = state.agent.inventory.iter().map(|it| it.color).collect();
    let doors = view.get_all("door").ok()?;
    let mut best: Option<Vec<Action>> = None;
    for door in doors {
        let closed = door.state.as_deref() == Some("closed");
        let ours = held.iter().any(|c| Some(c.name()) == door.color.as_deref());
        if closed && ours {
            if let Some(p) = view.interact_with(door.position.x, door.position.y).ok().flatten() {
                if best.as_ref().is_none_or(|b| p.len() < b.len()) {
                    best = Some(p);
                }
            }
        }
    }
    best.or_else(|| view.pickup_nearest("key").ok().flatten())
}

fn shortest_interaction(view: &ApiView<'_>, targets: &[Pos]) -> Option<(usize, Vec<Action>)> {
    targets
        .iter()
        .enumerate()
        .filter_map(|(i, p)| view.interact_with(p.x, p.y).ok().flatten().map(|plan| (i, plan)))
        .min_by_key(|(i, plan)| (plan.len(), *i))
}

fn lights_plan(state: &GridState, view: &ApiView<'_>, memory: &mut OracleState) -> Option<Vec<Action>> {
    if matches!(memory.scratch, Scratch::Empty) {
        let cells = board_cells(state);
        let on: Vec<bool> = cells.iter().map(|p| state.meta_at(*p) & meta::ACTIVE != 0).collect();
        memory.scratch = match solve_presses(board_size(state), &on) {
            Some(idx) => Scratch::Presses(idx.into_iter().map(|i| cells[i]).collect()),
            None => Scratch::Stuck,
        };
    }
    let Scratch::Presses(remaining) = &mut memory.scratch else {
        return None;
    };
    let (i, plan) = shortest_interaction(view, remaining)?;
    remaining.remove(i);
    Some(plan)
}

fn coloring_plan(state: &GridState, view: &ApiView<'_>, memory: &mut OracleState) -> Option<Vec<Action>> {
    let (k, nodes, edges) = graph_edges(state);
    let current: Vec<u8> = nodes.iter().map(|p| meta::palette(state.meta_at(*p))).collect();
    if matches!(memory.scratch, Scratch::Empty) {
        memory.scratch = match cheapest_coloring(k, &current, &edges) {
            Some(c) => Scratch::Coloring(c),
            None => Scratch::Stuck,
        };
    }
    let Scratch::Coloring(target) = &memory.scratch else {
        return None;
    };
    let (_, node, mut path) = nodes
        .iter()
        .enumerate()
        .filter(|(i, _)| current[*i] != target[*i])
        .filter_map(|(i, p)| view.path_to(p.x, p.y).ok().flatten().map(|path| (path.len(), i, path)))
        .min_by_key(|(len, i, _)| (*len, *i))?;
    let presses = presses_between(k, current[node], target[node]);
    path.extend(std::iter::repeat_n(Action::Interact, presses as usize));
    Some(path)
}

fn sequence_plan(state: &GridState, memory: &mut OracleState) -> Option<Vec<Action>> {
    let order = match &memory.scratch {
        Scratch::Sequence(seq) if seq.len() == sequence_cells(state).len() => seq.clone(),
        _ => sequence_cells(state),
    };
    let next = *order.get(recalled_count(state))?;
    let path = nav::walk_path(state, state.agent.position, next, |q| {
        state.is_walkable(q)
            && (q == next || state.object_at(q) != ObjectKind::Tile || state.meta_at(q) & meta::ACTIVE != 0)
    })?;
    Some(path.into_iter().map(|d| d.move_action()).collect())
}

/// Close on the quarry with the cheapest face-and-tag plan.
fn tag_step(view: &ApiView<'_>) -> Action {
    let quarries: Vec<Pos> = view.get_all("quarry").unwrap_or_default().iter().map(|e| e.position).collect();
    shortest_interaction(view, &quarries).and_then(|(_, plan)| plan.first().copied()).unwrap_or(Action::Noop)
}

/// Uniform draw over the six action codes.
pub fn random_act(rng: &mut StreamRng) -> Action {
    Action::ALL[rng.index(Action::ALL.len())]
}

/// Play the oracle from `state` to the end of the episode.
pub fn run_oracle(state: &GridState) -> GridState {
    let mut s = state.clone();
    let mut memory = OracleState::new();
    while !s.outcome.is_terminal() {
        let a = oracle_act(&s, &mut memory);
        step_env(&mut s, a).expect("running episode accepts actions");
    }
    s
}

/// Whether the oracle finishes the episode successfully.
pub fn oracle_solves(state: &GridState) -> bool {
    run_oracle(state).outcome == Outcome::Success
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub task: TaskId,
    pub difficulty: Difficulty,
    pub episodes: usize,
    pub success_rate: f64,
    pub mean_return: f64,
    pub mean_steps: f64,
}

/// Run the oracle on fresh episodes for each seed and summarize.
pub fn verify_oracle(task: TaskId, difficulty: Difficulty, seeds: &[u64]) -> Result<OracleCheck, EnvError> {
    if seeds.is_empty() {
        return Err(EnvError::NoSeeds);
    }
    let mut wins = 0usize;
    let mut total_return = 0.0;
    let mut total_steps = 0u64;
    for &seed in seeds {
        let end = run_oracle(&reset_env(task, difficulty, seed)?);
        wins += (end.outcome == Outcome::Success) as usize;
        total_return += end.cumulative_reward;
        total_steps += end.step_count as u64;
    }
    let n = seeds.len() as f64;
    Ok(OracleCheck {
        task,
        difficulty,
        episodes: seeds.len(),
        success_rate: wins as f64 / n,
        mean_return: total_return / n,
        mean_steps: total_steps as f64 / n,
    })
}
