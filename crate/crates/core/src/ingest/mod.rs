//! Detection-input loading, entity construction and the model-client stages.

pub mod clients;
pub mod normalize;

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};
use uuid::Uuid;

use crate::error::{parse_json, Error, Result};
use crate::model::{BBox, ElementLabel, Entity, EntityValue, LayoutLabel, SchemaWeights};

pub use clients::{
    classify_document, enrich_entities, gate_images, AlwaysUseful, CategoryClassifier,
    ConstantCategory, EnrichmentClient, EnrichmentResult, Fixture, FixtureCategory,
    FixtureEnrichment, FixtureUsefulness, UsefulnessClassifier, UsefulnessVerdict,
};
pub use normalize::{normalize_body, normalize_title};

/// Minimum confidence kept per detector; equality keeps the detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub layout: f64,
    pub element: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            layout: 0.20,
            element: 0.30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDetection {
    /// Caller-supplied entity id, preserved as-is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub label: String,
    pub confidence: f64,
    #[serde(deserialize_with = "ltrb", serialize_with = "to_ltrb")]
    pub bbox: BBox,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_payload: Option<String>,
}

fn ltrb<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BBox, D::Error> {
    let raw = <[f64; 4]>::deserialize(d)?;
    BBox::from_ltrb(raw).map_err(serde::de::Error::custom)
}

fn to_ltrb<S: serde::Serializer>(b: &BBox, s: S) -> std::result::Result<S::Ok, S::Error> {
    [b.left, b.top, b.right, b.bottom].serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageDetections {
    pub page_number: u32,
    #[serde(default)]
    pub element_detections: Vec<RawDetection>,
    #[serde(default)]
    pub layout_detections: Vec<RawDetection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_page_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionInput {
    pub filename: String,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    #[serde(default)]
    pub pages: Vec<PageDetections>,
}

/// A layout region that passed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutRegion {
    pub label: LayoutLabel,
    pub confidence: f64,
    pub bbox: BBox,
}

impl DetectionInput {
    pub fn from_json(path: &Path, text: &str, thresholds: Thresholds) -> Result<Self> {
        let input: DetectionInput = parse_json(path, text)?;
        input.validate()?;
        Ok(input.apply_thresholds(thresholds))
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for page in &self.pages {
            if page.page_number == 0 {
                return Err(Error::Validation("page_number must be positive".into()));
            }
            if !seen.insert(page.page_number) {
                return Err(Error::Validation(format!(
                    "duplicate page_number {}",
                    page.page_number
                )));
            }
            for det in page.element_detections.iter().chain(&page.layout_detections) {
                if det.label.is_empty() {
                    return Err(Error::Validation("detection with empty label".into()));
                }
                if !(0.0..=1.0).contains(&det.confidence) {
                    return Err(Error::Validation(format!(
                        "page {}: confidence {} outside [0, 1]",
                        page.page_number, det.confidence
                    )));
                }
            }
            for det in &page.element_detections {
                det.label.parse::<ElementLabel>()?;
            }
            for det in &page.layout_detections {
                det.label.parse::<LayoutLabel>()?;
            }
        }
        Ok(())
    }

    pub fn apply_thresholds(mut self, thresholds: Thresholds) -> Self {
        for page in &mut self.pages {
            page.element_detections.retain(|d| d.confidence >= thresholds.element);
            page.layout_detections.retain(|d| d.confidence >= thresholds.layout);
        }
        self
    }
}

impl PageDetections {
    pub fn layout_regions(&self) -> Result<Vec<LayoutRegion>> {
        self.layout_detections
            .iter()
            .map(|d| {
                Ok(LayoutRegion {
                    label: d.label.parse()?,
                    confidence: d.confidence,
                    bbox: d.bbox,
                })
            })
            .collect()
    }
}

/// Reads a detection-input file and drops detections under the thresholds.
pub fn load_detections(path: &Path, thresholds: Thresholds) -> Result<DetectionInput> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    DetectionInput::from_json(path, &text, thresholds)
}

/// Turns one page's element detections into entities with normalized text.
///
/// Detections without an id get a name-based UUID derived from the file name,
/// page and detection content, so ids do not depend on input order.
pub fn build_entities(
    filename: &str,
    page: &PageDetections,
    schema: &SchemaWeights,
) -> Result<Vec<Entity>> {
    let mut used = HashSet::new();
    page.element_detections
        .iter()
        .map(|det| {
            let label: ElementLabel = det.label.parse()?;
            let raw_text = det.text.as_deref().unwrap_or("");
            let text = if label.is_heading() {
                normalize_title(raw_text)
            } else {
                normalize_body(raw_text)
            };
            let id = match &det.id {
                Some(id) => id.clone(),
                None => derived_id(filename, page.page_number, det, &used),
            };
            if !used.insert(id.clone()) {
                return Err(Error::Validation(format!(
                    "page {}: duplicate entity id {id}",
                    page.page_number
                )));
            }
            let mut entity = Entity::new(id, label, det.confidence, EntityValue::text(text), det.bbox, schema)?;
            entity.image_payload = det.image_payload.clone();
            Ok(entity)
        })
        .collect()
}

fn derived_id(filename: &str, page: u32, det: &RawDetection, used: &HashSet<String>) -> String {
    let b = det.bbox;
    let base = format!(
        "{filename}|{page}|{}|{}|{},{},{},{}|{}",
        det.label,
        det.confidence,
        b.left,
        b.top,
        b.right,
        b.bottom,
        det.text.as_deref().unwrap_or("")
    );
    (0u32..)
        .map(|n| Uuid::new_v5(&Uuid::NAMESPACE_OID, format!("{base}|{n}").as_bytes()).to_string())
        .find(|id| !used.contains(id))
        .expect("unbounded id search")
}

/// Removes entities with fewer than three characters of text, except tables and images.
pub fn filter_small_text(entities: Vec<Entity>) -> Vec<Entity> {
    entities
        .into_iter()
        .filter(|e| e.label.is_visual() || e.text().trim().chars().count() >= 3)
        .collect()
}
