//! Observation synthesis. Every modality is rendered from one [`Snapshot`],
//! the observer's view of a state after fog and sensor noise are applied.

mod ascii;
mod language;
mod layers;
mod pixels;
mod structured;

use serde::{Deserialize, Serialize};

pub use ascii::{parse_ascii, render_ascii, AsciiCell, ParsedAscii};
pub use language::render_language;
pub use layers::{export_state_layers, StateLayers};
pub use pixels::{render_pixels, Frame, FRAME_SIZE};
pub use structured::{render_structured, StructuredObs};

use crate::grid::{meta, Color, EntityKind, GridState, ObjectKind, Pos, Terrain};
use crate::rng::{hash2, StreamRng};
use crate::tasks::{flashing_tile, TaskId};

/// Observation modality requested by an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObsMode {
    #[default]
    Ascii,
    Language,
    Structured,
    Pixels,
    StateDict,
}

impl ObsMode {
    pub const ALL: [ObsMode; 5] = [ObsMode::Ascii, ObsMode::Language, ObsMode::Structured, ObsMode::Pixels, ObsMode::StateDict];

    pub fn name(self) -> &'static str {
        match self {
            ObsMode::Ascii => "ascii",
            ObsMode::Language => "language",
            ObsMode::Structured => "structured",
            ObsMode::Pixels => "pixels",
            ObsMode::StateDict => "state_dict",
        }
    }

    /// Whether the modality is text an LLM can read directly.
    pub fn is_text(self) -> bool {
        matches!(self, ObsMode::Ascii | ObsMode::Language | ObsMode::Structured)
    }
}

impl std::str::FromStr for ObsMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ObsMode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown observation mode `{s}`"))
    }
}

/// What an observer sees: the true layers with sequence flashes and noise
/// ghosts overlaid, plus the fog mask if any.
#[derive(Debug, Clone)]
pub struct Snapshot<'a> {
    pub state: &'a GridState,
    pub objects: Vec<ObjectKind>,
    pub metadata: Vec<u16>,
    pub visible: Option<Vec<bool>>,
}

impl<'a> Snapshot<'a> {
    /// Full-knowledge snapshot with no fog.
    pub fn of(state: &'a GridState) -> Self {
        Snapshot::new(state, None)
    }

    pub fn new(state: &'a GridState, visible: Option<&[bool]>) -> Self {
        let mut snap = Snapshot {
            state,
            objects: state.objects.clone(),
            metadata: state.metadata.clone(),
            visible: visible.map(<[bool]>::to_vec),
        };
        if let Some(p) = flashing_tile(state) {
            let i = state.idx(p);
            snap.metadata[i] |= meta::FLASH;
        }
        if state.task == TaskId::NoisyObservation {
            for (p, kind, m) in ghosts(state) {
                let i = state.idx(p);
                snap.objects[i] = kind;
                snap.metadata[i] = m | meta::GHOST;
            }
        }
        snap
    }

    pub fn is_visible(&self, p: Pos) -> bool {
        self.visible.as_ref().is_none_or(|v| v[self.state.idx(p)])
    }

    pub fn object_at(&self, p: Pos) -> ObjectKind {
        self.objects[self.state.idx(p)]
    }

    pub fn meta_at(&self, p: Pos) -> u16 {
        self.metadata[self.state.idx(p)]
    }

    /// Everything the observer can see other than the agent and terrain,
    /// nearest first (ties by row, then column).
    pub fn seen_entities(&self) -> Vec<SeenEntity> {
        let s = self.state;
        let agent = s.agent.position;
        let mut out = Vec::new();
        for i in 0..s.cell_count() {
            let p = s.pos_of(i);
            if self.objects[i] != ObjectKind::None && self.is_visible(p) {
                out.push(SeenEntity::object(p, agent, self.objects[i], self.metadata[i]));
            }
        }
        for e in &s.entities {
            if self.is_visible(e.position) {
                out.push(SeenEntity::scripted(e.position, agent, e.kind));
            }
        }
        out.sort_by_key(|e| (e.distance, e.position[1], e.position[0]));
        out
    }
}

/// One observed thing, shared by the language and structured renderers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeenEntity {
    #[serde(rename = "type")]
    pub kind: String,
    pub position: [i32; 2],
    pub distance: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
}

impl SeenEntity {
    pub fn object(p: Pos, agent: Pos, kind: ObjectKind, m: u16) -> Self {
        let color = meta::color(m);
        SeenEntity {
            kind: kind.name().to_string(),
            position: [p.x, p.y],
            distance: p.manhattan(agent),
            color: (color != Color::None).then(|| color.name().to_string()),
            state: object_state(kind, m),
        }
    }

    pub fn scripted(p: Pos, agent: Pos, kind: EntityKind) -> Self {
        SeenEntity { kind: kind.name().to_string(), position: [p.x, p.y], distance: p.manhattan(agent), color: None, state: None }
    }

    /// Identity ignoring distance, for comparing modalities.
    pub fn identity(&self) -> (String, [i32; 2], Option<String>, Option<String>) {
        (self.kind.clone(), self.position, self.color.clone(), self.state.clone())
    }
}

/// State tag of an object as shown to observers.
pub fn object_state(kind: ObjectKind, m: u16) -> Option<String> {
    let active = m & meta::ACTIVE != 0;
    match kind {
        ObjectKind::Door => Some(if active { "open" } else { "closed" }.into()),
        ObjectKind::Light => Some(if active { "on" } else { "off" }.into()),
        ObjectKind::Box if m & meta::TARGET_UNDER != 0 => Some("on_target".into()),
        ObjectKind::Node => Some(match meta::palette(m) {
            0 => "uncolored".into(),
            c => format!("color_{c}"),
        }),
        ObjectKind::Tile if m & meta::FLASH != 0 => Some("flashing".into()),
        ObjectKind::Tile if active => Some("recalled".into()),
        _ => None,
    }
}

/// Per-step sensor noise: each goal or scroll may appear duplicated on a
/// nearby free cell. Drawn from a stream keyed by the episode seed and step,
/// so observations never touch the dynamics stream.
pub fn ghosts(state: &GridState) -> Vec<(Pos, ObjectKind, u16)> {
    let level = state.task.spec().params(state.difficulty).get("noise_level");
    let mut rng = StreamRng::new(hash2(hash2(state.seed, 0x0B5E_u64), state.step_count as u64));
    let mut taken: Vec<Pos> = Vec::new();
    let mut out = Vec::new();
    for i in 0..state.cell_count() {
        let kind = state.objects[i];
        if !matches!(kind, ObjectKind::Goal | ObjectKind::Scroll) {
            continue;
        }
        if !rng.chance(level) {
            continue;
        }
        let origin = state.pos_of(i);
        let free: Vec<Pos> = (-2..=2)
            .flat_map(|dy| (-2..=2).map(move |dx| Pos::new(origin.x + dx, origin.y + dy)))
            .filter(|p| {
                *p != origin
                    && state.interior(*p)
                    && state.terrain_at(*p) != Terrain::Wall
                    && state.object_at(*p) == ObjectKind::None
                    && state.agents[state.idx(*p)] == 0
                    && !taken.contains(p)
            })
            .collect();
        if let Some(p) = rng.choose(&free).copied() {
            taken.push(p);
            out.push((p, kind, state.metadata[i]));
        }
    }
    out
}

/// Cells within Chebyshev `radius` of `p`.
pub fn reveal_around(state: &GridState, mask: &mut [bool], p: Pos, radius: i32) {
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            let q = Pos::new(p.x + dx, p.y + dy);
            if state.in_bounds(q) {
                mask[state.idx(q)] = true;
            }
        }
    }
}

/// All five modalities of one snapshot. Pixels are optional because they
/// dominate rendering cost.
#[derive(Debug, Clone, Serialize)]
pub struct ObservationBundle {
    pub ascii: String,
    pub language: String,
    pub structured: StructuredObs,
    #[serde(skip)]
    pub pixels: Option<Frame>,
    pub state_layers: StateLayers,
}

pub fn render_bundle(snap: &Snapshot<'_>, with_pixels: bool) -> ObservationBundle {
    ObservationBundle {
        ascii: render_ascii(snap),
        language: render_language(snap),
        structured: render_structured(snap),
        pixels: with_pixels.then(|| render_pixels(snap)),
        state_layers: layers::snapshot_layers(snap),
    }
}

/// One observation in a single modality.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    Text(String),
    Pixels(Frame),
    Layers(StateLayers),
}

impl Observation {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Observation::Text(t) => Some(t),
            _ => None,
        }
    }
}

pub fn observe(snap: &Snapshot<'_>, mode: ObsMode) -> Observation {
    match mode {
        ObsMode::Ascii => Observation::Text(render_ascii(snap)),
        ObsMode::Language => Observation::Text(render_language(snap)),
        ObsMode::Structured => Observation::Text(render_structured(snap).to_json()),
        ObsMode::Pixels => Observation::Pixels(render_pixels(snap)),
        ObsMode::StateDict => Observation::Layers(layers::snapshot_layers(snap)),
    }
}
