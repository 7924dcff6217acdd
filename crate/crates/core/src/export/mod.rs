//! Markdown, retrieval chunks, knowledge graph and DP-Bench predictions.
//!
//! Every exporter is a pure function of a [`DocumentResult`](crate::model::DocumentResult).

pub mod chunks;
pub mod dpbench;
pub mod graph;
pub mod markdown;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use chunks::{chunks_to_ndjson, to_chunks, Chunk, ChunkKind, ChunkMetadata};
pub use dpbench::{category_for, to_dpbench, to_dpbench_file};
pub use graph::{to_graph, EdgeRelation, Graph, GraphEdge, GraphNode, NodeKind};
pub use markdown::{extract_list_items, to_markdown, MarkdownOptions};

use crate::error::Error;

/// Output artifacts a run can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[cfg_attr(feature = "cli", derive(clap::ValueEnum))]
pub enum Format {
    Json,
    Markdown,
    Chunks,
    Graph,
    Dpbench,
}

impl Format {
    pub const ALL: [Format; 5] = [Format::Json, Format::Markdown, Format::Chunks, Format::Graph, Format::Dpbench];

    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Markdown => "markdown",
            Format::Chunks => "chunks",
            Format::Graph => "graph",
            Format::Dpbench => "dpbench",
        }
    }

    /// File-name suffix appended to the document stem.
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Markdown => "md",
            Format::Chunks => "chunks.jsonl",
            Format::Graph => "graph.json",
            Format::Dpbench => "dpbench.json",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Format::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown format {s:?}")))
    }
}
