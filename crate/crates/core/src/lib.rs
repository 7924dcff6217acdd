//! Layout-aware document parsing: detection ingest, reading-order assembly,
//! exports for retrieval pipelines, and DP-Bench style evaluation.

pub mod assembly;
pub mod dpbench;
pub mod error;
pub mod export;
pub mod hash;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod pipeline;

pub use error::{Error, Result};
pub use model::{BBox, DocumentResult, ElementLabel, Entity, EntityValue, Group, GroupKind, LayoutLabel, PageResult, Point, SchemaWeights};
