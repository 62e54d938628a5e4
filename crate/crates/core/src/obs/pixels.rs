//! Flat-shaded isometric renderer. Each cell is a 2:1 diamond; contents are
//! drawn as smaller diamonds strictly inside their cell's diamond, so tiles
//! never overlap and painter's order only matters for future sprites.

use super::Snapshot;
use crate::grid::{meta, Color, EntityKind, ObjectKind, Pos, Terrain};

pub const FRAME_SIZE: usize = 512;

type Rgb = [u8; 3];

const BACKGROUND: Rgb = [18, 18, 24];
const FLOOR: Rgb = [196, 196, 184];
const WALL: Rgb = [72, 72, 84];
const ICE: Rgb = [182, 220, 240];
const FOG: Rgb = [44, 44, 54];
const AGENT: Rgb = [40, 90, 230];
const MARKER: Rgb = [255, 255, 255];

/// An 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Frame {
    fn filled(width: usize, height: usize, color: Rgb) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&color);
        }
        Frame { width, height, data }
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn distinct_colors(&self) -> std::collections::BTreeSet<Rgb> {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
    }

    /// PNG encoding, 8-bit RGB without alpha.
    pub fn to_png(&self) -> Vec<u8> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc.write_header().expect("png header");
            writer.write_image_data(&self.data).expect("png data");
        }
        out
    }
}

fn key_color(c: Color) -> Rgb {
    match c {
        Color::None => [200, 200, 200],
        Color::Gold => [235, 190, 40],
        Color::Red => [220, 50, 50],
        Color::Blue => [50, 100, 230],
        Color::Purple => [150, 70, 200],
        Color::Orange => [245, 140, 30],
        Color::Cyan => [40, 200, 210],
    }
}

fn dim(c: Rgb) -> Rgb {
    [c[0] / 2, c[1] / 2, c[2] / 2]
}

const NODE_PALETTE: [Rgb; 10] = [
    [150, 150, 150],
    [230, 70, 70],
    [70, 170, 90],
    [70, 110, 230],
    [230, 200, 60],
    [170, 80, 200],
    [60, 200, 200],
    [240, 140, 40],
    [120, 80, 40],
    [240, 120, 180],
];

/// Fill color and scale (in tenths of the tile) of an object.
fn object_style(kind: ObjectKind, m: u16) -> Option<(Rgb, u32)> {
    let active = m & meta::ACTIVE != 0;
    Some(match kind {
        ObjectKind::None => return None,
        ObjectKind::Goal => ([60, 200, 80], 7),
        ObjectKind::Key => (key_color(meta::color(m)), 4),
        ObjectKind::Door if active => (dim(key_color(meta::color(m))), 9),
        ObjectKind::Door => (key_color(meta::color(m)), 9),
        ObjectKind::Box if m & meta::TARGET_UNDER != 0 => ([110, 160, 60], 7),
        ObjectKind::Box => ([150, 100, 50], 7),
        ObjectKind::Target => ([220, 90, 90], 5),
        ObjectKind::Switch => ([120, 120, 120], 4),
        ObjectKind::Light if active => ([250, 240, 120], 7),
        ObjectKind::Light => ([90, 90, 60], 7),
        ObjectKind::Node => (NODE_PALETTE[meta::palette(m) as usize % NODE_PALETTE.len()], 6),
        ObjectKind::Tile if m & meta::FLASH != 0 => ([255, 255, 255], 8),
        ObjectKind::Tile if active => ([90, 200, 200], 8),
        ObjectKind::Tile => ([120, 120, 200], 8),
        ObjectKind::Scroll => ([230, 210, 160], 4),
        ObjectKind::Pen => ([170, 140, 100], 9),
        ObjectKind::Edge => ([110, 110, 110], 3),
    })
}

fn entity_color(kind: EntityKind) -> Rgb {
    match kind {
        EntityKind::Obstacle => [200, 40, 40],
        EntityKind::Sheep => [245, 245, 245],
        EntityKind::Quarry => [240, 120, 0],
    }
}

struct Projection {
    /// Half the diamond height; the full diamond is `4h` wide and `2h` tall.
    h: i64,
    ox: i64,
    oy: i64,
}

impl Projection {
    fn new(width: i32, height: i32) -> Self {
        let span = (width + height) as i64;
        let h = (FRAME_SIZE as i64 / (2 * span)).max(1);
        let total_w = span * 2 * h;
        let total_h = span * h;
        Projection {
            h,
            ox: (FRAME_SIZE as i64 - total_w) / 2 + height as i64 * 2 * h,
            oy: (FRAME_SIZE as i64 - total_h) / 2 + h,
        }
    }

    fn center(&self, p: Pos) -> (i64, i64) {
        (self.ox + (p.x - p.y) as i64 * 2 * self.h, self.oy + (p.x + p.y) as i64 * self.h)
    }
}

/// Fill a diamond centered at `(cx, cy)` (in half-pixels) scaled by `tenths / 10`.
fn diamond(frame: &mut Frame, proj: &Projection, cx2: i64, cy2: i64, tenths: u32, color: Rgb) {
    let h = proj.h;
    let limit = 4 * h * tenths as i64;
    let (x0, x1) = ((cx2 / 2 - 2 * h).max(0), (cx2 / 2 + 2 * h).min(frame.width as i64 - 1));
    let (y0, y1) = ((cy2 / 2 - h).max(0), (cy2 / 2 + h).min(frame.height as i64 - 1));
    for py in y0..=y1 {
        let dy = (2 * py + 1 - cy2).abs();
        let row = (py as usize * frame.width) * 3;
        for px in x0..=x1 {
            let dx = (2 * px + 1 - cx2).abs();
            if (dx + 2 * dy) * 10 < limit {
                let i = row + px as usize * 3;
                frame.data[i..i + 3].copy_from_slice(&color);
            }
        }
    }
}

pub fn render_pixels(snap: &Snapshot<'_>) -> Frame {
    let s = snap.state;
    let mut frame = Frame::filled(FRAME_SIZE, FRAME_SIZE, BACKGROUND);
    let proj = Projection::new(s.width, s.height);
    let mut order: Vec<Pos> = (0..s.cell_count()).map(|i| s.pos_of(i)).collect();
    order.sort_by_key(|p| (p.x + p.y, p.x));
    for p in order {
        let (cx, cy) = proj.center(p);
        let (cx2, cy2) = (2 * cx, 2 * cy);
        if !snap.is_visible(p) {
            diamond(&mut frame, &proj, cx2, cy2, 10, FOG);
            continue;
        }
        let terrain = s.terrain_at(p);
        let base = match terrain {
            Terrain::Wall => WALL,
            Terrain::Empty => FLOOR,
            Terrain::Ice => ICE,
        };
        diamond(&mut frame, &proj, cx2, cy2, 10, base);
        if let Some((color, scale)) = object_style(snap.object_at(p), snap.meta_at(p)) {
            diamond(&mut frame, &proj, cx2, cy2, scale, color);
        }
        if let Some(e) = s.entity_at(p) {
            diamond(&mut frame, &proj, cx2, cy2, 5, entity_color(e.kind));
        }
        if p == s.agent.position && terrain != Terrain::Wall {
            diamond(&mut frame, &proj, cx2, cy2, 5, AGENT);
            let (dx, dy) = s.agent.orientation.delta();
            let (sx, sy) = ((dx - dy) as i64 * 2 * proj.h, (dx + dy) as i64 * proj.h);
            // Marker sits 30% of the way toward the faced neighbor.
            diamond(&mut frame, &proj, cx2 + sx * 6 / 10, cy2 + sy * 6 / 10, 2, MARKER);
        }
    }
    frame
}
