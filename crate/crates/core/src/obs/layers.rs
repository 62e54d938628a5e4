use serde::{Deserialize, Serialize};

use super::Snapshot;
use crate::grid::{EntityKind, GridState, Item};

/// Copies of the four grids plus the agent record. Grids are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateLayers {
    pub width: i32,
    pub height: i32,
    pub terrain: Vec<i8>,
    pub objects: Vec<i8>,
    /// 1 marks the agent; `2 + id` marks the scripted entity with that id.
    pub agents: Vec<i8>,
    pub metadata: Vec<i16>,
    /// Kind of each scripted entity by id; removed entities leave `None`.
    pub entity_kinds: Vec<Option<EntityKind>>,
    pub position: [i32; 2],
    pub orientation: String,
    pub inventory: Vec<Item>,
    pub energy: f64,
}

impl StateLayers {
    pub fn at(&self, layer: &[i8], x: i32, y: i32) -> i8 {
        layer[(y * self.width + x) as usize]
    }
}

/// Copies of the true state's layers.
pub fn export_state_layers(state: &GridState) -> StateLayers {
    build(state, &state.objects, &state.metadata)
}

/// Layers as observed, with flashes and noise ghosts included.
pub(super) fn snapshot_layers(snap: &Snapshot<'_>) -> StateLayers {
    build(snap.state, &snap.objects, &snap.metadata)
}

fn build(state: &GridState, objects: &[crate::grid::ObjectKind], metadata: &[u16]) -> StateLayers {
    StateLayers {
        width: state.width,
        height: state.height,
        terrain: state.terrain.iter().map(|t| *t as i8).collect(),
        objects: objects.iter().map(|o| *o as i8).collect(),
        agents: state.agents.clone(),
        metadata: metadata.iter().map(|m| *m as i16).collect(),
        entity_kinds: {
            let len = state.entities.iter().map(|e| e.id as usize + 1).max().unwrap_or(0);
            let mut kinds = vec![None; len];
            for e in &state.entities {
                kinds[e.id as usize] = Some(e.kind);
            }
            kinds
        },
        position: [state.agent.position.x, state.agent.position.y],
        orientation: state.agent.orientation.name().into(),
        inventory: state.agent.inventory.clone(),
        energy: state.agent.energy,
    }
}
