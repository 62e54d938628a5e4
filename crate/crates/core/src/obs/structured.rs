use serde::{Deserialize, Serialize};

use super::{SeenEntity, Snapshot};
use crate::grid::{valid_actions_of, Item};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct XY {
    pub x: i32,
    pub y: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InventoryEntry {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
}

impl From<&Item> for InventoryEntry {
    fn from(it: &Item) -> Self {
        InventoryEntry {
            kind: it.kind.name().into(),
            color: (it.color != crate::grid::Color::None).then(|| it.color.name().into()),
        }
    }
}

/// Key-value observation; field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredObs {
    pub description: String,
    pub position: XY,
    pub orientation: String,
    pub visible_entities: Vec<SeenEntity>,
    pub inventory: Vec<InventoryEntry>,
    pub valid_actions: Vec<String>,
    pub step_count: u32,
    pub max_steps: u32,
}

impl StructuredObs {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("structured observation serializes")
    }
}

pub fn render_structured(snap: &Snapshot<'_>) -> StructuredObs {
    let s = snap.state;
    StructuredObs {
        description: format!("A {}x{} gridworld environment", s.width, s.height),
        position: XY { x: s.agent.position.x, y: s.agent.position.y },
        orientation: s.agent.orientation.name().into(),
        visible_entities: snap.seen_entities(),
        inventory: s.agent.inventory.iter().map(InventoryEntry::from).collect(),
        valid_actions: valid_actions_of(s).iter().map(|a| a.name().to_string()).collect(),
        step_count: s.step_count,
        max_steps: s.max_steps,
    }
}
