//! Text grid: one row per line, each cell a token of one or two characters
//! left-justified in a two-character field, followed by a legend block.

use std::collections::BTreeSet;

use super::{SeenEntity, Snapshot};
use crate::grid::{meta, Color, Direction, EntityKind, ObjectKind, Pos, Terrain};

fn object_token(kind: ObjectKind, m: u16) -> String {
    let c = meta::color(m).initial();
    let active = m & meta::ACTIVE != 0;
    match kind {
        ObjectKind::None => String::new(),
        ObjectKind::Goal => "G".into(),
        ObjectKind::Key => format!("K{c}"),
        ObjectKind::Door if active => format!("d{c}"),
        ObjectKind::Door => format!("D{c}"),
        ObjectKind::Box if m & meta::TARGET_UNDER != 0 => "B*".into(),
        ObjectKind::Box => "B".into(),
        ObjectKind::Target => "X".into(),
        ObjectKind::Switch => "S".into(),
        ObjectKind::Light if active => "L".into(),
        ObjectKind::Light => "l".into(),
        ObjectKind::Node => format!("N{}", meta::palette(m)),
        ObjectKind::Tile if m & meta::FLASH != 0 => "T!".into(),
        ObjectKind::Tile if active => "T+".into(),
        ObjectKind::Tile => "T".into(),
        ObjectKind::Scroll => "%".into(),
        ObjectKind::Pen => "P".into(),
        ObjectKind::Edge => "+".into(),
    }
}

fn entity_glyph(kind: EntityKind) -> char {
    match kind {
        EntityKind::Obstacle => 'O',
        EntityKind::Sheep => 's',
        EntityKind::Quarry => 'Q',
    }
}

const LEGEND: [(&str, &str); 22] = [
    ("G", "Goal"),
    ("K", "Key"),
    ("D", "Door (closed)"),
    ("d", "Door (open)"),
    ("B", "Box"),
    ("B*", "Box on target"),
    ("X", "Target"),
    ("S", "Switch"),
    ("L", "Light (on)"),
    ("l", "Light (off)"),
    ("N", "Node + color index (0 = uncolored)"),
    ("T", "Tile"),
    ("T!", "Tile (flashing)"),
    ("T+", "Tile (recalled)"),
    ("%", "Scroll"),
    ("P", "Pen"),
    ("+", "Edge"),
    ("O", "Obstacle"),
    ("s", "Sheep"),
    ("Q", "Quarry"),
    ("~", "Ice"),
    ("?", "Unexplored"),
];

/// Legend key a token belongs to.
fn legend_key(token: &str) -> &str {
    match token {
        "B*" | "T!" | "T+" => token,
        _ => {
            let first = token.chars().next().map_or(0, char::len_utf8);
            &token[..first]
        }
    }
}

pub fn render_ascii(snap: &Snapshot<'_>) -> String {
    let s = snap.state;
    let mut out = String::with_capacity((s.width as usize * 2 + 1) * s.height as usize + 256);
    let mut seen: BTreeSet<&'static str> = BTreeSet::new();
    let mut colors: BTreeSet<Color> = BTreeSet::new();
    for y in 0..s.height {
        let mut line = String::with_capacity(s.width as usize * 2);
        for x in 0..s.width {
            let p = Pos::new(x, y);
            let object = snap.object_at(p);
            let m = snap.meta_at(p);
            let token = if !snap.is_visible(p) {
                "?".to_string()
            } else if p == s.agent.position {
                s.agent.orientation.glyph().to_string()
            } else if let Some(e) = s.entity_at(p) {
                let under = object_token(object, m);
                let mut t = entity_glyph(e.kind).to_string();
                if under.chars().count() == 1 {
                    t.push_str(&under);
                }
                t
            } else if object != ObjectKind::None {
                object_token(object, m)
            } else {
                match s.terrain_at(p) {
                    Terrain::Wall => "#".into(),
                    Terrain::Empty => ".".into(),
                    Terrain::Ice => "~".into(),
                }
            };
            if snap.is_visible(p) && object != ObjectKind::None {
                let c = meta::color(m);
                if c != Color::None {
                    colors.insert(c);
                }
            }
            for part in legend_parts(&token) {
                if let Some((k, _)) = LEGEND.iter().find(|(k, _)| *k == part) {
                    seen.insert(k);
                }
            }
            line.push_str(&format!("{token:<2}"));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push_str("\nLegend:\n^ v < > : Agent (facing)\n# : Wall   . : Empty\n");
    let entries: Vec<String> =
        LEGEND.iter().filter(|(k, _)| seen.contains(k)).map(|(k, v)| format!("{k} : {v}")).collect();
    for pair in entries.chunks(2) {
        out.push_str(&pair.join("   "));
        out.push('\n');
    }
    if !colors.is_empty() {
        let names: Vec<String> = colors.iter().map(|c| format!("{}={}", c.initial(), c.name())).collect();
        out.push_str(&names.join(" "));
        out.push('\n');
    }
    let here = s.agent.position;
    let under = snap.object_at(here);
    if under != ObjectKind::None {
        out.push_str(&format!("Underfoot: {}\n", object_token(under, snap.meta_at(here))));
    }
    out
}

/// Legend keys used by a rendered token (an entity may stand on an object).
fn legend_parts(token: &str) -> Vec<&str> {
    let mut chars = token.char_indices();
    match chars.next() {
        Some((_, c)) if matches!(c, 'O' | 's' | 'Q') && token.len() > 1 => vec![&token[..1], legend_key(&token[1..])],
        Some(_) => vec![legend_key(token)],
        None => vec![],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("no grid rows found")]
    Empty,
    #[error("unknown token `{token}` at ({x}, {y})")]
    UnknownToken { token: String, x: i32, y: i32 },
    #[error("no agent glyph in grid")]
    NoAgent,
}

/// One decoded cell. `terrain` is `None` for unexplored cells.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AsciiCell {
    pub terrain: Option<Terrain>,
    pub object: Option<(ObjectKind, Option<Color>, Option<String>)>,
    pub entity: Option<EntityKind>,
    pub agent: Option<Direction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedAscii {
    pub width: i32,
    pub height: i32,
    pub cells: Vec<AsciiCell>,
    pub agent: Pos,
}

impl ParsedAscii {
    pub fn cell(&self, p: Pos) -> &AsciiCell {
        &self.cells[(p.y * self.width + p.x) as usize]
    }

    /// Objects and scripted entities, nearest first like the other modalities.
    pub fn entities(&self) -> Vec<SeenEntity> {
        let mut out = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            let p = Pos::new(i as i32 % self.width, i as i32 / self.width);
            if let Some((kind, color, state)) = &c.object {
                out.push(SeenEntity {
                    kind: kind.name().into(),
                    position: [p.x, p.y],
                    distance: p.manhattan(self.agent),
                    color: color.map(|c| c.name().into()),
                    state: state.clone(),
                });
            }
        }
        for (i, c) in self.cells.iter().enumerate() {
            if let Some(kind) = c.entity {
                let p = Pos::new(i as i32 % self.width, i as i32 / self.width);
                out.push(SeenEntity::scripted(p, self.agent, kind));
            }
        }
        out.sort_by_key(|e| (e.distance, e.position[1], e.position[0]));
        out
    }
}

type Decoded = (ObjectKind, Option<Color>, Option<String>);

fn decode_object(token: &str) -> Option<Decoded> {
    let mut chars = token.chars();
    let first = chars.next()?;
    let second = chars.next();
    if chars.next().is_some() {
        return None;
    }
    let colored = |kind: ObjectKind, state: &str| -> Option<Decoded> {
        let c = Color::from_initial(second?)?;
        Some((kind, Some(c), Some(state.into())))
    };
    let plain = |kind: ObjectKind, state: Option<&str>| -> Option<Decoded> {
        second.is_none().then(|| (kind, None, state.map(str::to_string)))
    };
    match (first, second) {
        ('K', Some(c)) => Color::from_initial(c).map(|c| (ObjectKind::Key, Some(c), None)),
        ('D', _) => colored(ObjectKind::Door, "closed"),
        ('d', _) => colored(ObjectKind::Door, "open"),
        ('B', Some('*')) => Some((ObjectKind::Box, None, Some("on_target".into()))),
        ('T', Some('!')) => Some((ObjectKind::Tile, None, Some("flashing".into()))),
        ('T', Some('+')) => Some((ObjectKind::Tile, None, Some("recalled".into()))),
        ('N', Some(d)) => {
            let v = d.to_digit(10)?;
            let state = if v == 0 { "uncolored".to_string() } else { format!("color_{v}") };
            Some((ObjectKind::Node, None, Some(state)))
        }
        ('G', _) => plain(ObjectKind::Goal, None),
        ('B', _) => plain(ObjectKind::Box, None),
        ('X', _) => plain(ObjectKind::Target, None),
        ('S', _) => plain(ObjectKind::Switch, None),
        ('L', _) => plain(ObjectKind::Light, Some("on")),
        ('l', _) => plain(ObjectKind::Light, Some("off")),
        ('T', _) => plain(ObjectKind::Tile, None),
        ('%', _) => plain(ObjectKind::Scroll, None),
        ('P', _) => plain(ObjectKind::Pen, None),
        ('+', _) => plain(ObjectKind::Edge, None),
        _ => None,
    }
}

fn decode_cell(token: &str) -> Option<AsciiCell> {
    let floor = |object| AsciiCell { terrain: Some(Terrain::Empty), object, ..AsciiCell::default() };
    match token {
        "#" => return Some(AsciiCell { terrain: Some(Terrain::Wall), ..AsciiCell::default() }),
        "." => return Some(floor(None)),
        "~" => return Some(AsciiCell { terrain: Some(Terrain::Ice), ..AsciiCell::default() }),
        "?" => return Some(AsciiCell::default()),
        _ => {}
    }
    let first = token.chars().next()?;
    if let Some(d) = Direction::ALL.into_iter().find(|d| d.glyph() == first) {
        return (token.len() == 1).then(|| AsciiCell { agent: Some(d), ..floor(None) });
    }
    let entity = match first {
        'O' => Some(EntityKind::Obstacle),
        's' => Some(EntityKind::Sheep),
        'Q' => Some(EntityKind::Quarry),
        _ => None,
    };
    if let Some(kind) = entity {
        let rest = &token[1..];
        let object = if rest.is_empty() { None } else { Some(decode_object(rest)?) };
        return Some(AsciiCell { entity: Some(kind), ..floor(object) });
    }
    decode_object(token).map(|o| floor(Some(o)))
}

/// Decode the grid and underfoot line of a rendered ASCII observation.
pub fn parse_ascii(text: &str) -> Result<ParsedAscii, ParseError> {
    let rows: Vec<&str> = text.lines().take_while(|l| !l.is_empty()).collect();
    if rows.is_empty() {
        return Err(ParseError::Empty);
    }
    let width = rows.iter().map(|r| r.chars().count().div_ceil(2)).max().unwrap_or(0) as i32;
    let height = rows.len() as i32;
    let mut cells = Vec::with_capacity((width * height) as usize);
    let mut agent = None;
    for (y, row) in rows.iter().enumerate() {
        let chars: Vec<char> = row.chars().collect();
        for x in 0..width as usize {
            let token: String = chars.iter().skip(2 * x).take(2).collect::<String>().trim_end().to_string();
            let token = if token.is_empty() { "?".to_string() } else { token };
            let cell = decode_cell(&token).ok_or_else(|| ParseError::UnknownToken {
                token: token.clone(),
                x: x as i32,
                y: y as i32,
            })?;
            if cell.agent.is_some() {
                agent = Some(Pos::new(x as i32, y as i32));
            }
            cells.push(cell);
        }
    }
    let agent = agent.ok_or(ParseError::NoAgent)?;
    let mut parsed = ParsedAscii { width, height, cells, agent };
    if let Some(line) = text.lines().find_map(|l| l.strip_prefix("Underfoot: ")) {
        let object = decode_object(line.trim()).ok_or_else(|| ParseError::UnknownToken {
            token: line.to_string(),
            x: agent.x,
            y: agent.y,
        })?;
        let i = (agent.y * width + agent.x) as usize;
        parsed.cells[i].object = Some(object);
    }
    Ok(parsed)
}
