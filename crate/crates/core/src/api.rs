//! Agent-facing query and steering API over a live episode.

use serde::Serialize;

use crate::env::Env;
use crate::grid::{
    faced_cell, meta, Action, Color, Direction, EntityKind, GridState, Item, ObjectKind, Pos, StepResult,
    Terrain, ACTION_NAMES,
};
use crate::nav;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApiError {
    #[error("unknown entity kind `{0}`")]
    UnknownKind(String),
    #[error("cell ({0}, {1}) is outside the grid")]
    OutOfBounds(i32, i32),
    #[error("unknown action name `{0}`")]
    UnknownAction(String),
    #[error(transparent)]
    Env(#[from] crate::error::EnvError),
}

/// One thing on the board, as seen from the agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityInfo {
    #[serde(rename = "type")]
    pub kind: String,
    pub position: Pos,
    pub distance: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CellContent {
    pub terrain: Terrain,
    pub object: ObjectKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counters {
    pub current_step: u32,
    pub max_steps: u32,
    pub total_reward: f64,
    pub is_done: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Object(ObjectKind),
    Entity(EntityKind),
}

fn parse_kind(name: &str) -> Result<Kind, ApiError> {
    if let Some(k) = ObjectKind::from_name(name).filter(|k| *k != ObjectKind::None) {
        return Ok(Kind::Object(k));
    }
    EntityKind::from_name(name).map(Kind::Entity).ok_or_else(|| ApiError::UnknownKind(name.to_string()))
}

/// Read-only view of a state with a cached walkability grid.
#[derive(Debug, Clone)]
pub struct ApiView<'a> {
    state: &'a GridState,
    walkable: Vec<bool>,
}

impl<'a> ApiView<'a> {
    pub fn new(state: &'a GridState) -> Self {
        let walkable = (0..state.cell_count()).map(|i| state.is_walkable(state.pos_of(i))).collect();
        ApiView { state, walkable }
    }

    pub fn state(&self) -> &'a GridState {
        self.state
    }

    pub fn agent_position(&self) -> Pos {
        self.state.agent.position
    }

    fn check(&self, x: i32, y: i32) -> Result<Pos, ApiError> {
        let p = Pos::new(x, y);
        if self.state.in_bounds(p) {
            Ok(p)
        } else {
            Err(ApiError::OutOfBounds(x, y))
        }
    }

    fn info(&self, kind: String, p: Pos, color: Color, state: Option<&str>) -> EntityInfo {
        EntityInfo {
            kind,
            position: p,
            distance: p.manhattan(self.agent_position()),
            color: (color != Color::None).then(|| color.name().to_string()),
            state: state.map(str::to_string),
        }
    }

    fn object_info(&self, p: Pos) -> Option<EntityInfo> {
        let kind = self.state.object_at(p);
        if kind == ObjectKind::None {
            return None;
        }
        let m = self.state.meta_at(p);
        let tag = match kind {
            ObjectKind::Door => Some(if m & meta::ACTIVE != 0 { "open" } else { "closed" }),
            ObjectKind::Light => Some(if m & meta::ACTIVE != 0 { "on" } else { "off" }),
            _ => None,
        };
        Some(self.info(kind.name().to_string(), p, meta::color(m), tag))
    }

    fn all_of(&self, kind: Kind) -> Vec<EntityInfo> {
        let mut out: Vec<EntityInfo> = match kind {
            Kind::Object(k) => self.state.positions_of(k).into_iter().filter_map(|p| self.object_info(p)).collect(),
            Kind::Entity(k) => self
                .state
                .entities
                .iter()
                .filter(|e| e.kind == k)
                .map(|e| self.info(k.name().to_string(), e.position, Color::None, None))
                .collect(),
        };
        out.sort_by_key(|e| (e.distance, e.position.y, e.position.x));
        out
    }

    /// Closest instance of `kind`, ties broken by row then column.
    pub fn get_nearest(&self, kind: &str) -> Result<Option<EntityInfo>, ApiError> {
        Ok(self.all_of(parse_kind(kind)?).into_iter().next())
    }

    /// Every instance of `kind`, nearest first.
    pub fn get_all(&self, kind: &str) -> Result<Vec<EntityInfo>, ApiError> {
        Ok(self.all_of(parse_kind(kind)?))
    }

    /// Scripted entity on the cell if there is one, else the object there.
    pub fn get_entity_at(&self, x: i32, y: i32) -> Result<Option<EntityInfo>, ApiError> {
        let p = self.check(x, y)?;
        if let Some(e) = self.state.entity_at(p) {
            return Ok(Some(self.info(e.kind.name().to_string(), p, Color::None, None)));
        }
        Ok(self.object_info(p))
    }

    pub fn distance_to(&self, x: i32, y: i32) -> Result<u32, ApiError> {
        Ok(self.check(x, y)?.manhattan(self.agent_position()))
    }

    /// Compass name of the dominant axis toward the cell (vertical on ties,
    /// `"here"` for the agent's own cell).
    pub fn direction_to(&self, x: i32, y: i32) -> Result<&'static str, ApiError> {
        let p = self.check(x, y)?;
        let a = self.agent_position();
        let (dx, dy) = (p.x - a.x, p.y - a.y);
        Ok(match (dx, dy) {
            (0, 0) => "here",
            _ if dy.abs() >= dx.abs() => {
                if dy < 0 {
                    "north"
                } else {
                    "south"
                }
            }
            _ if dx < 0 => "west",
            _ => "east",
        })
    }

    pub fn is_adjacent(&self, x: i32, y: i32) -> Result<bool, ApiError> {
        Ok(self.distance_to(x, y)? == 1)
    }

    /// Walkable orthogonal neighbors in clockwise order from north.
    pub fn neighbors(&self, x: i32, y: i32) -> Result<Vec<Pos>, ApiError> {
        let p = self.check(x, y)?;
        Ok([Direction::North, Direction::East, Direction::South, Direction::West]
            .into_iter()
            .map(|d| p.step(d))
            .filter(|q| self.walkable_at(*q))
            .collect())
    }

    fn walkable_at(&self, p: Pos) -> bool {
        self.state.in_bounds(p) && self.walkable[self.state.idx(p)]
    }

    pub fn is_walkable(&self, x: i32, y: i32) -> Result<bool, ApiError> {
        Ok(self.walkable_at(self.check(x, y)?))
    }

    pub fn is_reachable(&self, x: i32, y: i32) -> Result<bool, ApiError> {
        let p = self.check(x, y)?;
        Ok(self.route(p).is_some())
    }

    /// Cells matching `keep`, ordered by column, then row.
    fn cells_where(&self, keep: impl Fn(usize) -> bool) -> Vec<Pos> {
        let s = self.state;
        (0..s.width)
            .flat_map(|x| (0..s.height).map(move |y| Pos::new(x, y)))
            .filter(|p| keep(s.idx(*p)))
            .collect()
    }

    /// Walkable cells ordered by `(x, y)`.
    pub fn get_walkable_cells(&self) -> Vec<Pos> {
        self.cells_where(|i| self.walkable[i])
    }

    /// Wall cells ordered by `(x, y)`.
    pub fn get_wall_cells(&self) -> Vec<Pos> {
        self.cells_where(|i| self.state.terrain[i] == Terrain::Wall)
    }

    pub fn cell_content(&self, x: i32, y: i32) -> Result<CellContent, ApiError> {
        let p = self.check(x, y)?;
        Ok(CellContent { terrain: self.state.terrain_at(p), object: self.state.object_at(p) })
    }

    fn route(&self, to: Pos) -> Option<Vec<Direction>> {
        nav::walk_path(self.state, self.agent_position(), to, |q| self.walkable_at(q))
    }

    /// Shortest list of move actions to the cell; `None` when unreachable.
    pub fn path_to(&self, x: i32, y: i32) -> Result<Option<Vec<Action>>, ApiError> {
        let p = self.check(x, y)?;
        Ok(self.route(p).map(|dirs| dirs.into_iter().map(Direction::move_action).collect()))
    }

    /// Path to the nearest instance of `kind`, or to its closest walkable
    /// neighbor when the cell itself blocks.
    pub fn go_to_nearest(&self, kind: &str) -> Result<Option<Vec<Action>>, ApiError> {
        let Some(target) = self.get_nearest(kind)? else {
            return Ok(None);
        };
        let p = target.position;
        if self.walkable_at(p) {
            return self.path_to(p.x, p.y);
        }
        let best = Direction::ALL
            .into_iter()
            .map(|d| p.step(d))
            .filter_map(|q| self.route(q))
            .min_by_key(|r| r.len());
        Ok(best.map(|dirs| dirs.into_iter().map(Direction::move_action).collect()))
    }

    /// First action of `path_to`, or noop when there is nothing to do.
    pub fn move_toward(&self, x: i32, y: i32) -> Result<Action, ApiError> {
        Ok(self.path_to(x, y)?.and_then(|p| p.first().copied()).unwrap_or(Action::Noop))
    }

    /// Walkable move that most increases Manhattan distance from the cell.
    pub fn flee_from(&self, x: i32, y: i32) -> Result<Action, ApiError> {
        let from = self.check(x, y)?;
        let here = self.agent_position();
        let mut best = (here.manhattan(from), Action::Noop);
        for d in Direction::ALL {
            let q = here.step(d);
            if self.walkable_at(q) && q.manhattan(from) > best.0 {
                best = (q.manhattan(from), d.move_action());
            }
        }
        Ok(best.1)
    }

    /// Moves that end adjacent to and facing the cell, then interact.
    pub fn interact_with(&self, x: i32, y: i32) -> Result<Option<Vec<Action>>, ApiError> {
        let p = self.check(x, y)?;
        Ok(nav::face_plan_with(self.state, p, |q| self.walkable_at(q)).map(|dirs| {
            let mut out: Vec<Action> = dirs.into_iter().map(Direction::move_action).collect();
            out.push(Action::Interact);
            out
        }))
    }

    /// `interact_with` on the nearest instance of `kind` that can be approached.
    pub fn pickup_nearest(&self, kind: &str) -> Result<Option<Vec<Action>>, ApiError> {
        for target in self.get_all(kind)? {
            if let Some(plan) = self.interact_with(target.position.x, target.position.y)? {
                return Ok(Some(plan));
            }
        }
        Ok(None)
    }

    pub fn inventory(&self) -> &[Item] {
        &self.state.agent.inventory
    }

    pub fn has_in_inventory(&self, kind: &str) -> Result<bool, ApiError> {
        let Kind::Object(k) = parse_kind(kind)? else {
            return Ok(false);
        };
        Ok(self.state.agent.inventory.iter().any(|it| it.kind == k))
    }

    pub fn facing(&self) -> Pos {
        faced_cell(self.state)
    }

    pub fn action_names(&self) -> Vec<&'static str> {
        ACTION_NAMES.to_vec()
    }

    pub fn action_name_to_int(&self, name: &str) -> Result<u8, ApiError> {
        Action::from_name(name).map(|a| a.code()).ok_or_else(|| ApiError::UnknownAction(name.to_string()))
    }

    pub fn counters(&self) -> Counters {
        Counters {
            current_step: self.state.step_count,
            max_steps: self.state.max_steps,
            total_reward: self.state.cumulative_reward,
            is_done: self.state.outcome.is_terminal(),
        }
    }
}

/// API bound to an environment it can also step.
pub struct Api<'e> {
    env: &'e mut Env,
}

impl<'e> Api<'e> {
    pub fn new(env: &'e mut Env) -> Self {
        Api { env }
    }

    /// Fresh view over the current state.
    pub fn view(&self) -> ApiView<'_> {
        ApiView::new(self.env.state())
    }

    pub fn step_action(&mut self, code: i64) -> Result<StepResult, ApiError> {
        Ok(self.env.step(code)?)
    }
}
