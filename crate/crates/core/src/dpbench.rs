//! DP-Bench prediction/reference file format.
//!
//! A file maps document names to `{"elements": [...]}`. Each element carries a
//! category, a four-point polygon (left-top, right-top, right-bottom,
//! left-bottom), an integer id, a page number and its content.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::model::BBox;

pub const CATEGORIES: [&str; 12] = [
    "Table", "Paragraph", "Figure", "Chart", "Header", "Footer", "Caption", "Equation", "Heading1", "List",
    "Index", "Footnote",
];

/// Categories left out of the reading-order text.
pub const NID_EXCLUDED: [&str; 3] = ["Table", "Figure", "Chart"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpPoint {
    pub x: f64,
    pub y: f64,
}

impl<'de> Deserialize<'de> for DpPoint {
    /// Accepts `{"x": .., "y": ..}` or `[x, y]`.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Object { x: f64, y: f64 },
            Pair([f64; 2]),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Object { x, y } => DpPoint { x, y },
            Repr::Pair([x, y]) => DpPoint { x, y },
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DpContent {
    #[serde(default)]
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub html: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub markdown: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpBenchElement {
    pub category: String,
    #[serde(deserialize_with = "four_points")]
    pub coordinates: Vec<DpPoint>,
    pub id: u64,
    pub page: u32,
    #[serde(default)]
    pub content: DpContent,
}

fn four_points<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<DpPoint>, D::Error> {
    let pts = Vec::<DpPoint>::deserialize(d)?;
    if pts.len() != 4 {
        return Err(serde::de::Error::custom(format!("expected 4 coordinate points, got {}", pts.len())));
    }
    Ok(pts)
}

impl DpBenchElement {
    /// `[LT, RT, RB, LB]` for `b`.
    pub fn polygon(b: &BBox) -> Vec<DpPoint> {
        vec![
            DpPoint { x: b.left, y: b.top },
            DpPoint { x: b.right, y: b.top },
            DpPoint { x: b.right, y: b.bottom },
            DpPoint { x: b.left, y: b.bottom },
        ]
    }

    /// Axis-aligned bounds of the polygon.
    pub fn bbox(&self) -> Result<BBox> {
        let xs = self.coordinates.iter().map(|p| p.x);
        let ys = self.coordinates.iter().map(|p| p.y);
        BBox::new(
            xs.clone().fold(f64::INFINITY, f64::min),
            ys.clone().fold(f64::INFINITY, f64::min),
            xs.fold(f64::NEG_INFINITY, f64::max),
            ys.fold(f64::NEG_INFINITY, f64::max),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DpBenchDocument {
    pub elements: Vec<DpBenchElement>,
}

pub type DpBenchFile = BTreeMap<String, DpBenchDocument>;

pub fn read_file(path: &std::path::Path) -> Result<DpBenchFile> {
    crate::error::read_json(path)
}

pub fn validate_category(category: &str) -> Result<()> {
    if CATEGORIES.contains(&category) {
        Ok(())
    } else {
        Err(Error::UnknownLabel(category.to_string()))
    }
}
