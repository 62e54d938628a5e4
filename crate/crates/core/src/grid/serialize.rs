//! Canonical binary layout of a [`GridState`].
//!
//! ```text
//! "AGTK" | version u16 | task u8 | difficulty u8 | seed u64 | reward_mode u8
//! width u16 | height u16 | terrain i8[] | objects i8[] | agents i8[] | metadata u16[]
//! agent: x u16 | y u16 | orientation u8 | energy f64 | n_items u16 | (kind u8, color u8)*
//! entities: n u16 | (id u8, kind u8, x u16, y u16, behavior u8, lo i32, hi i32, state i32)*
//! step_count u32 | max_steps u32 | rng counter u64 | cumulative_reward f64 | outcome u8
//! task_vars: n u32 | i32*
//! ```
//! All multi-byte integers are little-endian; floats are IEEE-754 bit patterns.

use super::{
    AgentRecord, Behavior, Color, Direction, EntityKind, GridState, Item, ObjectKind, Outcome, Pos, ScriptedEntity,
    Terrain,
};
use crate::rng::StreamRng;
use crate::tasks::{Difficulty, RewardMode, TaskId};

pub const MAGIC: &[u8; 4] = b"AGTK";
pub const VERSION: u16 = 1;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported version {0}")]
    Version(u16),
    #[error("truncated input")]
    Truncated,
    #[error("invalid {0} code")]
    InvalidCode(&'static str),
    #[error("{0} trailing bytes")]
    Trailing(usize),
}

pub fn encode_state(s: &GridState) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + s.cell_count() * 5);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(s.task.code());
    out.push(s.difficulty.code());
    out.extend_from_slice(&s.seed.to_le_bytes());
    out.push(s.reward_mode.code());
    out.extend_from_slice(&(s.width as u16).to_le_bytes());
    out.extend_from_slice(&(s.height as u16).to_le_bytes());
    out.extend(s.terrain.iter().map(|t| *t as i8 as u8));
    out.extend(s.objects.iter().map(|o| *o as i8 as u8));
    out.extend(s.agents.iter().map(|a| *a as u8));
    for m in &s.metadata {
        out.extend_from_slice(&m.to_le_bytes());
    }
    let a = &s.agent;
    out.extend_from_slice(&(a.position.x as u16).to_le_bytes());
    out.extend_from_slice(&(a.position.y as u16).to_le_bytes());
    out.push(a.orientation.code());
    out.extend_from_slice(&a.energy.to_bits().to_le_bytes());
    out.extend_from_slice(&(a.inventory.len() as u16).to_le_bytes());
    for it in &a.inventory {
        out.push(it.kind as i8 as u8);
        out.push(it.color as u8);
    }
    out.extend_from_slice(&(s.entities.len() as u16).to_le_bytes());
    for e in &s.entities {
        out.push(e.id);
        out.push(e.kind as u8);
        out.extend_from_slice(&(e.position.x as u16).to_le_bytes());
        out.extend_from_slice(&(e.position.y as u16).to_le_bytes());
        out.push(e.behavior.code());
        let (lo, hi) = match e.behavior {
            Behavior::Patrol { lo, hi, .. } => (lo, hi),
            _ => (0, 0),
        };
        out.extend_from_slice(&lo.to_le_bytes());
        out.extend_from_slice(&hi.to_le_bytes());
        out.extend_from_slice(&e.state.to_le_bytes());
    }
    out.extend_from_slice(&s.step_count.to_le_bytes());
    out.extend_from_slice(&s.max_steps.to_le_bytes());
    out.extend_from_slice(&s.rng.counter().to_le_bytes());
    out.extend_from_slice(&s.cumulative_reward.to_bits().to_le_bytes());
    out.push(s.outcome.code());
    out.extend_from_slice(&(s.task_vars.len() as u32).to_le_bytes());
    for v in &s.task_vars {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        let end = self.at.checked_add(n).ok_or(DecodeError::Truncated)?;
        let slice = self.buf.get(self.at..end).ok_or(DecodeError::Truncated)?;
        self.at = end;
        Ok(slice)
    }
    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, DecodeError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn i32(&mut self) -> Result<i32, DecodeError> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, DecodeError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, DecodeError> {
        Ok(f64::from_bits(self.u64()?))
    }
}

pub fn decode_state(bytes: &[u8]) -> Result<GridState, DecodeError> {
    let mut r = Reader { buf: bytes, at: 0 };
    if r.take(4)? != MAGIC {
        return Err(DecodeError::BadMagic);
    }
    let version = r.u16()?;
    if version != VERSION {
        return Err(DecodeError::Version(version));
    }
    let task = TaskId::from_code(r.u8()?).ok_or(DecodeError::InvalidCode("task"))?;
    let difficulty = Difficulty::from_code(r.u8()?).ok_or(DecodeError::InvalidCode("difficulty"))?;
    let seed = r.u64()?;
    let reward_mode = RewardMode::from_code(r.u8()?).ok_or(DecodeError::InvalidCode("reward mode"))?;
    let width = r.u16()? as i32;
    let height = r.u16()? as i32;
    let n = (width * height) as usize;
    let terrain = r
        .take(n)?
        .iter()
        .map(|b| Terrain::from_code(*b as i8).ok_or(DecodeError::InvalidCode("terrain")))
        .collect::<Result<Vec<_>, _>>()?;
    let objects = r
        .take(n)?
        .iter()
        .map(|b| ObjectKind::from_code(*b as i8).ok_or(DecodeError::InvalidCode("object")))
        .collect::<Result<Vec<_>, _>>()?;
    let agents = r.take(n)?.iter().map(|b| *b as i8).collect();
    let metadata = (0..n).map(|_| r.u16()).collect::<Result<Vec<_>, _>>()?;
    let position = Pos::new(r.u16()? as i32, r.u16()? as i32);
    let orientation = Direction::from_code(r.u8()?).ok_or(DecodeError::InvalidCode("orientation"))?;
    let energy = r.f64()?;
    let n_items = r.u16()?;
    let mut inventory = Vec::with_capacity(n_items as usize);
    for _ in 0..n_items {
        let kind = ObjectKind::from_code(r.u8()? as i8).ok_or(DecodeError::InvalidCode("item"))?;
        let color = Color::from_code(r.u8()? as u16).ok_or(DecodeError::InvalidCode("color"))?;
        inventory.push(Item { kind, color });
    }
    let n_entities = r.u16()?;
    let mut entities = Vec::with_capacity(n_entities as usize);
    for _ in 0..n_entities {
        let id = r.u8()?;
        let kind = EntityKind::from_code(r.u8()?).ok_or(DecodeError::InvalidCode("entity"))?;
        let position = Pos::new(r.u16()? as i32, r.u16()? as i32);
        let bcode = r.u8()?;
        let lo = r.i32()?;
        let hi = r.i32()?;
        let state = r.i32()?;
        let behavior = match bcode {
            0 => Behavior::Patrol { horizontal: true, lo, hi },
            1 => Behavior::Patrol { horizontal: false, lo, hi },
            2 => Behavior::Flee,
            3 => Behavior::Herd,
            _ => return Err(DecodeError::InvalidCode("behavior")),
        };
        entities.push(ScriptedEntity { id, kind, position, behavior, state });
    }
    let step_count = r.u32()?;
    let max_steps = r.u32()?;
    let rng = StreamRng::from_counter(r.u64()?);
    let cumulative_reward = r.f64()?;
    let outcome = Outcome::from_code(r.u8()?).ok_or(DecodeError::InvalidCode("outcome"))?;
    let n_vars = r.u32()?;
    let task_vars = (0..n_vars).map(|_| r.i32()).collect::<Result<Vec<_>, _>>()?;
    if r.at != bytes.len() {
        return Err(DecodeError::Trailing(bytes.len() - r.at));
    }
    Ok(GridState {
        task,
        difficulty,
        seed,
        reward_mode,
        width,
        height,
        terrain,
        objects,
        agents,
        metadata,
        agent: AgentRecord { position, orientation, inventory, energy },
        entities,
        step_count,
        max_steps,
        rng,
        cumulative_reward,
        outcome,
        task_vars,
    })
}
