//! Layered grid state shared by every task.
//!
//! Coordinates are `(x, y)` with `x` growing rightward, `y` growing downward
//! and the origin in the top-left corner. All four layers are stored row-major
//! with identical `width * height` dimensions.

mod engine;
mod serialize;

pub use engine::{apply_move, faced_cell, step_env, valid_actions_of, MoveOutcome, StepResult};
pub use serialize::{decode_state, encode_state, DecodeError, MAGIC, VERSION};

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::rng::StreamRng;
use crate::tasks::{Difficulty, RewardMode, TaskId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    pub const fn new(x: i32, y: i32) -> Self {
        Pos { x, y }
    }

    pub fn step(self, dir: Direction) -> Pos {
        let (dx, dy) = dir.delta();
        Pos::new(self.x + dx, self.y + dy)
    }

    pub fn manhattan(self, other: Pos) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn is_adjacent(self, other: Pos) -> bool {
        self.manhattan(other) == 1
    }

    /// Direction of a unit step from `self` to `other`, if they are adjacent.
    pub fn direction_to_adjacent(self, other: Pos) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| self.step(*d) == other)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Compass orientation. `ALL` is the fixed expansion order up, down, left, right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    North,
    South,
    West,
    East,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::South, Direction::West, Direction::East];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::North => (0, -1),
            Direction::South => (0, 1),
            Direction::West => (-1, 0),
            Direction::East => (1, 0),
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::South => Direction::North,
            Direction::West => Direction::East,
            Direction::East => Direction::West,
        }
    }

    /// Direction obtained by turning 90 degrees clockwise.
    pub fn right(self) -> Direction {
        match self {
            Direction::North => Direction::East,
            Direction::East => Direction::South,
            Direction::South => Direction::West,
            Direction::West => Direction::North,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::South => "south",
            Direction::West => "west",
            Direction::East => "east",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Direction::North => 0,
            Direction::South => 1,
            Direction::West => 2,
            Direction::East => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Direction> {
        Direction::ALL.get(code as usize).copied()
    }

    pub fn move_action(self) -> Action {
        match self {
            Direction::North => Action::MoveUp,
            Direction::South => Action::MoveDown,
            Direction::West => Action::MoveLeft,
            Direction::East => Action::MoveRight,
        }
    }

    pub fn glyph(self) -> char {
        match self {
            Direction::North => '^',
            Direction::South => 'v',
            Direction::West => '<',
            Direction::East => '>',
        }
    }
}

/// The six-action interface shared by every task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
#[repr(u8)]
pub enum Action {
    Noop = 0,
    MoveUp = 1,
    MoveDown = 2,
    MoveLeft = 3,
    MoveRight = 4,
    Interact = 5,
}

pub const ACTION_NAMES: [&str; 6] = ["noop", "move_up", "move_down", "move_left", "move_right", "interact"];

impl Action {
    pub const ALL: [Action; 6] =
        [Action::Noop, Action::MoveUp, Action::MoveDown, Action::MoveLeft, Action::MoveRight, Action::Interact];

    pub fn from_code(code: i64) -> Option<Action> {
        usize::try_from(code).ok().and_then(|c| Action::ALL.get(c).copied())
    }

    pub fn from_name(name: &str) -> Option<Action> {
        ACTION_NAMES.iter().position(|n| *n == name).map(|i| Action::ALL[i])
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        ACTION_NAMES[self as usize]
    }

    pub fn direction(self) -> Option<Direction> {
        match self {
            Action::MoveUp => Some(Direction::North),
            Action::MoveDown => Some(Direction::South),
            Action::MoveLeft => Some(Direction::West),
            Action::MoveRight => Some(Direction::East),
            _ => None,
        }
    }
}

impl From<Action> for u8 {
    fn from(a: Action) -> u8 {
        a.code()
    }
}

impl TryFrom<u8> for Action {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Action::from_code(v as i64).ok_or_else(|| format!("invalid action code {v}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(i8)]
pub enum Terrain {
    Empty = 0,
    Wall = 1,
    Ice = 2,
}

impl Terrain {
    pub fn from_code(code: i8) -> Option<Terrain> {
        match code {
            0 => Some(Terrain::Empty),
            1 => Some(Terrain::Wall),
            2 => Some(Terrain::Ice),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Terrain::Empty => "empty",
            Terrain::Wall => "wall",
            Terrain::Ice => "ice",
        }
    }
}

/// Object classes stored in the objects layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(i8)]
pub enum ObjectKind {
    None = 0,
    Goal = 1,
    Key = 2,
    Door = 3,
    Box = 4,
    Target = 5,
    Switch = 6,
    Light = 7,
    Node = 8,
    Tile = 9,
    Scroll = 10,
    Pen = 11,
    Edge = 12,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 13] = [
        ObjectKind::None,
        ObjectKind::Goal,
        ObjectKind::Key,
        ObjectKind::Door,
        ObjectKind::Box,
        ObjectKind::Target,
        ObjectKind::Switch,
        ObjectKind::Light,
        ObjectKind::Node,
        ObjectKind::Tile,
        ObjectKind::Scroll,
        ObjectKind::Pen,
        ObjectKind::Edge,
    ];

    pub fn from_code(code: i8) -> Option<ObjectKind> {
        usize::try_from(code).ok().and_then(|c| ObjectKind::ALL.get(c).copied())
    }

    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::None => "none",
            ObjectKind::Goal => "goal",
            ObjectKind::Key => "key",
            ObjectKind::Door => "door",
            ObjectKind::Box => "box",
            ObjectKind::Target => "target",
            ObjectKind::Switch => "switch",
            ObjectKind::Light => "light",
            ObjectKind::Node => "node",
            ObjectKind::Tile => "tile",
            ObjectKind::Scroll => "scroll",
            ObjectKind::Pen => "pen",
            ObjectKind::Edge => "edge",
        }
    }

    pub fn from_name(name: &str) -> Option<ObjectKind> {
        ObjectKind::ALL.into_iter().find(|k| *k != ObjectKind::None && k.name() == name)
    }
}

/// Scripted entity classes, living in the agents layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum EntityKind {
    Obstacle = 0,
    Sheep = 1,
    Quarry = 2,
}

impl EntityKind {
    pub const ALL: [EntityKind; 3] = [EntityKind::Obstacle, EntityKind::Sheep, EntityKind::Quarry];

    pub fn name(self) -> &'static str {
        match self {
            EntityKind::Obstacle => "obstacle",
            EntityKind::Sheep => "sheep",
            EntityKind::Quarry => "quarry",
        }
    }

    pub fn from_name(name: &str) -> Option<EntityKind> {
        EntityKind::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn from_code(code: u8) -> Option<EntityKind> {
        EntityKind::ALL.get(code as usize).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum Color {
    None = 0,
    Gold = 1,
    Red = 2,
    Blue = 3,
    Purple = 4,
    Orange = 5,
    Cyan = 6,
}

impl Color {
    pub const KEYED: [Color; 6] = [Color::Gold, Color::Red, Color::Blue, Color::Purple, Color::Orange, Color::Cyan];

    pub fn from_code(code: u16) -> Option<Color> {
        match code {
            0 => Some(Color::None),
            1 => Some(Color::Gold),
            2 => Some(Color::Red),
            3 => Some(Color::Blue),
            4 => Some(Color::Purple),
            5 => Some(Color::Orange),
            6 => Some(Color::Cyan),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::None => "none",
            Color::Gold => "gold",
            Color::Red => "red",
            Color::Blue => "blue",
            Color::Purple => "purple",
            Color::Orange => "orange",
            Color::Cyan => "cyan",
        }
    }

    pub fn initial(self) -> char {
        match self {
            Color::None => ' ',
            Color::Gold => 'g',
            Color::Red => 'r',
            Color::Blue => 'b',
            Color::Purple => 'p',
            Color::Orange => 'o',
            Color::Cyan => 'c',
        }
    }

    pub fn from_initial(c: char) -> Option<Color> {
        Color::KEYED.into_iter().find(|k| k.initial() == c)
    }
}

/// Bit layout of the 16-bit metadata layer.
pub mod meta {
    /// Bits 0..4: color code.
    pub const COLOR_MASK: u16 = 0x000F;
    /// Door open, light on, tile recalled.
    pub const ACTIVE: u16 = 1 << 4;
    /// A storage target lies beneath the box on this cell.
    pub const TARGET_UNDER: u16 = 1 << 5;
    /// Sequence tile shown in the current observation.
    pub const FLASH: u16 = 1 << 6;
    /// Observation-only duplicate produced by noise.
    pub const GHOST: u16 = 1 << 7;
    /// Bits 8..12: node palette index (0 = uncolored).
    pub const PALETTE_SHIFT: u16 = 8;
    pub const PALETTE_MASK: u16 = 0x0F00;

    pub fn color(m: u16) -> super::Color {
        super::Color::from_code(m & COLOR_MASK).unwrap_or(super::Color::None)
    }

    pub fn palette(m: u16) -> u8 {
        ((m & PALETTE_MASK) >> PALETTE_SHIFT) as u8
    }

    pub fn with_palette(m: u16, index: u8) -> u16 {
        (m & !PALETTE_MASK) | (((index as u16) << PALETTE_SHIFT) & PALETTE_MASK)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Item {
    pub kind: ObjectKind,
    pub color: Color,
}

impl Item {
    pub fn describe(&self) -> String {
        if self.color == Color::None {
            self.kind.name().to_string()
        } else {
            format!("{} {}", self.color.name(), self.kind.name())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub position: Pos,
    pub orientation: Direction,
    pub inventory: Vec<Item>,
    pub energy: f64,
}

/// Behavior program of a scripted entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    /// Back-and-forth along a row (`horizontal`) or column between `lo..=hi`.
    Patrol { horizontal: bool, lo: i32, hi: i32 },
    /// Runs away from the agent when close, wanders otherwise.
    Flee,
    /// Pushed away by an adjacent agent, wanders otherwise.
    Herd,
}

impl Behavior {
    pub fn code(&self) -> u8 {
        match self {
            Behavior::Patrol { horizontal: true, .. } => 0,
            Behavior::Patrol { horizontal: false, .. } => 1,
            Behavior::Flee => 2,
            Behavior::Herd => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedEntity {
    pub id: u8,
    pub kind: EntityKind,
    pub position: Pos,
    pub behavior: Behavior,
    /// Behavior register, e.g. patrol heading (+1/-1).
    pub state: i32,
}

/// Agents-layer code of the controlled agent; scripted entity `i` is `ENTITY_BASE + i`.
pub const AGENT_MARK: i8 = 1;
pub const ENTITY_BASE: i8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Running,
    Success,
    Failure,
    Truncated,
}

impl Outcome {
    pub fn is_terminal(self) -> bool {
        self != Outcome::Running
    }

    pub fn code(self) -> u8 {
        match self {
            Outcome::Running => 0,
            Outcome::Success => 1,
            Outcome::Failure => 2,
            Outcome::Truncated => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Outcome> {
        match code {
            0 => Some(Outcome::Running),
            1 => Some(Outcome::Success),
            2 => Some(Outcome::Failure),
            3 => Some(Outcome::Truncated),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Running => "running",
            Outcome::Success => "success",
            Outcome::Failure => "failure",
            Outcome::Truncated => "truncated",
        }
    }
}

/// Full mutable world state of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub task: TaskId,
    pub difficulty: Difficulty,
    /// Episode seed requested by the caller.
    pub seed: u64,
    pub reward_mode: RewardMode,
    pub width: i32,
    pub height: i32,
    pub terrain: Vec<Terrain>,
    pub objects: Vec<ObjectKind>,
    pub agents: Vec<i8>,
    pub metadata: Vec<u16>,
    pub agent: AgentRecord,
    pub entities: Vec<ScriptedEntity>,
    pub step_count: u32,
    pub max_steps: u32,
    pub rng: StreamRng,
    pub cumulative_reward: f64,
    pub outcome: Outcome,
    /// Task-specific registers (sequence order, pen rectangle, graph edges...).
    pub task_vars: Vec<i32>,
}

impl GridState {
    /// An all-empty room with wall boundary and the agent at `agent` facing north.
    pub fn empty_room(task: TaskId, difficulty: Difficulty, width: i32, height: i32, agent: Pos) -> GridState {
        let n = (width * height) as usize;
        let mut s = GridState {
            task,
            difficulty,
            seed: 0,
            reward_mode: RewardMode::Sparse,
            width,
            height,
            terrain: vec![Terrain::Empty; n],
            objects: vec![ObjectKind::None; n],
            agents: vec![0; n],
            metadata: vec![0; n],
            agent: AgentRecord { position: agent, orientation: Direction::North, inventory: Vec::new(), energy: 1.0 },
            entities: Vec::new(),
            step_count: 0,
            max_steps: difficulty.max_steps(),
            rng: StreamRng::new(0),
            cumulative_reward: 0.0,
            outcome: Outcome::Running,
            task_vars: Vec::new(),
        };
        for y in 0..height {
            for x in 0..width {
                if x == 0 || y == 0 || x == width - 1 || y == height - 1 {
                    s.terrain[(y * width + x) as usize] = Terrain::Wall;
                }
            }
        }
        s.sync_agents_layer();
        s
    }

    pub fn in_bounds(&self, p: Pos) -> bool {
        p.x >= 0 && p.y >= 0 && p.x < self.width && p.y < self.height
    }

    pub fn interior(&self, p: Pos) -> bool {
        p.x > 0 && p.y > 0 && p.x < self.width - 1 && p.y < self.height - 1
    }

    pub fn idx(&self, p: Pos) -> usize {
        debug_assert!(self.in_bounds(p), "{p} out of bounds");
        (p.y * self.width + p.x) as usize
    }

    pub fn pos_of(&self, idx: usize) -> Pos {
        Pos::new(idx as i32 % self.width, idx as i32 / self.width)
    }

    pub fn cell_count(&self) -> usize {
        (self.width * self.height) as usize
    }

    pub fn terrain_at(&self, p: Pos) -> Terrain {
        if self.in_bounds(p) {
            self.terrain[self.idx(p)]
        } else {
            Terrain::Wall
        }
    }

    pub fn object_at(&self, p: Pos) -> ObjectKind {
        if self.in_bounds(p) {
            self.objects[self.idx(p)]
        } else {
            ObjectKind::None
        }
    }

    pub fn meta_at(&self, p: Pos) -> u16 {
        if self.in_bounds(p) {
            self.metadata[self.idx(p)]
        } else {
            0
        }
    }

    pub fn set_terrain(&mut self, p: Pos, t: Terrain) {
        let i = self.idx(p);
        self.terrain[i] = t;
    }

    pub fn set_object(&mut self, p: Pos, kind: ObjectKind, meta: u16) {
        let i = self.idx(p);
        self.objects[i] = kind;
        self.metadata[i] = meta;
    }

    pub fn entity_at(&self, p: Pos) -> Option<&ScriptedEntity> {
        if !self.in_bounds(p) {
            return None;
        }
        let code = self.agents[self.idx(p)];
        if code >= ENTITY_BASE {
            let id = (code - ENTITY_BASE) as u8;
            self.entities.iter().find(|e| e.id == id)
        } else {
            None
        }
    }

    pub fn positions_of(&self, kind: ObjectKind) -> Vec<Pos> {
        self.objects
            .iter()
            .enumerate()
            .filter(|(_, k)| **k == kind)
            .map(|(i, _)| self.pos_of(i))
            .collect()
    }

    /// Whether the agent can stand on `p` given the current world.
    pub fn is_walkable(&self, p: Pos) -> bool {
        self.in_bounds(p)
            && self.terrain[self.idx(p)] != Terrain::Wall
            && !self.object_blocks(p)
            && self.agents[self.idx(p)] < ENTITY_BASE
    }

    /// Closed doors, boxes and lights stop movement; everything else is floor decoration.
    pub fn object_blocks(&self, p: Pos) -> bool {
        let i = self.idx(p);
        match self.objects[i] {
            ObjectKind::Door => self.metadata[i] & meta::ACTIVE == 0,
            ObjectKind::Box | ObjectKind::Light => true,
            _ => false,
        }
    }

    /// Rebuild the agents layer from the agent record and entity list.
    pub fn sync_agents_layer(&mut self) {
        self.agents.iter_mut().for_each(|c| *c = 0);
        let a = self.idx(self.agent.position);
        self.agents[a] = AGENT_MARK;
        for e in &self.entities {
            let i = (e.position.y * self.width + e.position.x) as usize;
            self.agents[i] = ENTITY_BASE + e.id as i8;
        }
    }

    pub fn move_entity(&mut self, slot: usize, to: Pos) {
        let from = self.entities[slot].position;
        let fi = self.idx(from);
        let ti = self.idx(to);
        self.agents[fi] = 0;
        self.agents[ti] = ENTITY_BASE + self.entities[slot].id as i8;
        self.entities[slot].position = to;
    }

    pub fn move_agent(&mut self, to: Pos) {
        let fi = self.idx(self.agent.position);
        let ti = self.idx(to);
        self.agents[fi] = 0;
        self.agents[ti] = AGENT_MARK;
        self.agent.position = to;
    }

    /// Check the structural invariants; returns a description of the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.cell_count();
        if self.terrain.len() != n || self.objects.len() != n || self.agents.len() != n || self.metadata.len() != n {
            return Err("layer dimensions differ".into());
        }
        for y in 0..self.height {
            for x in 0..self.width {
                let p = Pos::new(x, y);
                if !self.interior(p) && self.terrain_at(p) != Terrain::Wall {
                    return Err(format!("boundary cell {p} is not a wall"));
                }
            }
        }
        let marks = self.agents.iter().filter(|c| **c == AGENT_MARK).count();
        if marks != 1 {
            return Err(format!("{marks} agent marks"));
        }
        if !self.interior(self.agent.position) || self.agents[self.idx(self.agent.position)] != AGENT_MARK {
            return Err("agent mark does not match agent position".into());
        }
        for e in &self.entities {
            if !self.interior(e.position) {
                return Err(format!("entity {} outside interior", e.id));
            }
        }
        let mut rebuilt = self.clone();
        rebuilt.sync_agents_layer();
        if rebuilt.agents != self.agents {
            return Err("agents layer incoherent with records".into());
        }
        if self.step_count > self.max_steps {
            return Err("step_count exceeds max_steps".into());
        }
        if !(0.0..=1.0).contains(&self.agent.energy) {
            return Err("energy out of range".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_names_order() {
        assert_eq!(ACTION_NAMES, ["noop", "move_up", "move_down", "move_left", "move_right", "interact"]);
        assert_eq!(Action::from_name("move_up"), Some(Action::MoveUp));
        assert_eq!(Action::from_code(6), None);
        assert_eq!(Action::from_code(-1), None);
    }

    #[test]
    fn empty_room_is_well_formed() {
        let s = GridState::empty_room(TaskId::GoToGoal, Difficulty::Easy, 5, 5, Pos::new(2, 2));
        s.check_invariants().unwrap();
        assert_eq!(s.positions_of(ObjectKind::None).len(), 25);
    }

    #[test]
    fn palette_bits() {
        let m = meta::with_palette(Color::Red as u16, 3);
        assert_eq!(meta::palette(m), 3);
        assert_eq!(meta::color(m), Color::Red);
    }
}
