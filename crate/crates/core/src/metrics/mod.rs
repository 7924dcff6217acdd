//! NID, TEDS and TEDS-S, and the evaluation harness built on them.

pub mod eval;
pub mod table;
pub mod ted;
pub mod text;

pub use eval::{evaluate, evaluate_files, serialize_for_nid, EvalMode, EvalReport, SampleScore};
pub use table::{parse_table_html, TableTree};
pub use ted::{teds, teds_s, tree_edit_distance};
pub use text::{indel_distance, nid};
