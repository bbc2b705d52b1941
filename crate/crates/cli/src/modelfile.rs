//! The on-disk model description: a schema-versioned JSON document listing
//! directions, blocks, and direction-labeled connections.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "directions": [[1, 0, 0], [0, 1, 0]],
//!   "blocks": [{ "id": 1 }, { "id": 2, "label": "axle" }],
//!   "connections": [{ "from": 1, "to": 2, "direction": 0 }]
//! }
//! ```

use std::path::Path;

use blockplan_core::model::{ModelGraph, RawBlock, RawConnection, RawModel};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema: u32,
    pub directions: Vec<[i64; 3]>,
    pub blocks: Vec<BlockEntry>,
    pub connections: Vec<ConnectionEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionEntry {
    pub from: u64,
    pub to: u64,
    pub direction: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<String>,
}

impl ModelFile {
    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| CliError::Parse(format!("ParseError: {e}")))?;
        if file.schema != SCHEMA_VERSION {
            return Err(CliError::Parse(format!(
                "ParseError: unsupported schema version {} (expected {SCHEMA_VERSION})",
                file.schema
            )));
        }
        Ok(file)
    }

    pub fn to_raw(&self) -> RawModel {
        RawModel {
            directions: self.directions.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| RawBlock {
                    id: b.id,
                    label: b.label.clone(),
                    meta: b.meta.clone(),
                })
                .collect(),
            connections: self
                .connections
                .iter()
                .map(|c| RawConnection {
                    from: c.from,
                    to: c.to,
                    direction: c.direction,
                    meta: c.meta.clone(),
                })
                .collect(),
        }
    }

    /// Normalized export of an ingested model; re-ingesting it reproduces
    /// the same [`ModelGraph`].
    pub fn from_graph(g: &ModelGraph) -> Self {
        let raw = g.to_raw();
        ModelFile {
            schema: SCHEMA_VERSION,
            directions: raw.directions,
            blocks: raw
                .blocks
                .into_iter()
                .map(|b| BlockEntry {
                    id: b.id,
                    label: b.label,
                    meta: b.meta,
                })
                .collect(),
            connections: raw
                .connections
                .into_iter()
                .map(|c| ConnectionEntry {
                    from: c.from,
                    to: c.to,
                    direction: c.direction,
                    meta: c.meta,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("model file serializes");
        text.push('\n');
        text
    }
}

/// Reads, parses, and validates a model file into a normalized graph.
pub fn load_model(path: &Path) -> Result<ModelGraph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("ParseError: cannot read {}: {e}", path.display())))?;
    let file = ModelFile::parse_str(&text)?;
    blockplan_core::model::validate_model(&file.to_raw()).map_err(|diags| {
        let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        CliError::Domain(lines.join("\n"))
    })
}
