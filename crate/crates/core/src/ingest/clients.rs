//! Pluggable model clients: image usefulness, enrichment and document category.
//!
//! Every client speaks in JSON request/response records. The fixture-backed
//! implementations answer from a list of `{request, response}` pairs where a
//! fixture request matches when each of its fields equals the field of the
//! same name in the outgoing request.

use std::path::Path;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{read_json, Error, Result};
use crate::hash::content_hash_hex;
use crate::model::{validate_rows, ElementLabel, Entity, Row};

pub const UNCATEGORIZED: &str = "uncategorized";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UsefulnessVerdict {
    Useful,
    Useless,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TextOrData {
    Text(String),
    Data(Vec<Row>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    #[serde(default, rename = "text", skip_serializing_if = "Option::is_none")]
    pub text_or_data: Option<TextOrData>,
}

impl EnrichmentResult {
    /// Parses a response record; `data` is accepted as an alias for a row list under `text`.
    pub fn from_response(value: &Value) -> Result<Self> {
        if let Some(err) = value.get("error") {
            return Err(Error::Client(err.to_string()));
        }
        let mut parsed: EnrichmentResult = serde_json::from_value(value.clone())?;
        if parsed.text_or_data.is_none() {
            if let Some(data) = value.get("data") {
                parsed.text_or_data = Some(TextOrData::Data(serde_json::from_value(data.clone())?));
            }
        }
        if parsed.title.is_none() && parsed.summary.is_none() && parsed.text_or_data.is_none() {
            return Err(Error::Client("enrichment response has no fields".into()));
        }
        if let Some(TextOrData::Data(rows)) = &parsed.text_or_data {
            validate_rows(rows)?;
        }
        Ok(parsed)
    }
}

pub trait UsefulnessClassifier: Send + Sync {
    fn classify(&self, entity: &Entity) -> Result<UsefulnessVerdict>;
}

pub trait EnrichmentClient: Send + Sync {
    fn enrich(&self, entity: &Entity) -> Result<EnrichmentResult>;
}

pub trait CategoryClassifier: Send + Sync {
    fn classify(&self, text: &str) -> Result<String>;
}

/// Stub gate that lets every image through.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysUseful;

impl UsefulnessClassifier for AlwaysUseful {
    fn classify(&self, _entity: &Entity) -> Result<UsefulnessVerdict> {
        Ok(UsefulnessVerdict::Useful)
    }
}

/// Stub category classifier returning a fixed label.
#[derive(Debug, Clone)]
pub struct ConstantCategory(pub String);

impl Default for ConstantCategory {
    fn default() -> Self {
        Self(UNCATEGORIZED.to_string())
    }
}

impl CategoryClassifier for ConstantCategory {
    fn classify(&self, _text: &str) -> Result<String> {
        Ok(self.0.clone())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub request: Value,
    pub response: Value,
}

#[derive(Debug, Clone, Default)]
pub struct Fixture {
    entries: Vec<FixtureEntry>,
}

impl Fixture {
    pub fn new(entries: Vec<FixtureEntry>) -> Self {
        Self { entries }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(Self::new(read_json(path)?))
    }

    pub fn lookup(&self, request: &Value) -> Option<&Value> {
        self.entries
            .iter()
            .find(|entry| request_matches(&entry.request, request))
            .map(|entry| &entry.response)
    }
}

fn request_matches(pattern: &Value, request: &Value) -> bool {
    match pattern {
        Value::Object(fields) => fields.iter().all(|(k, v)| request.get(k) == Some(v)),
        other => other == request,
    }
}

/// Request record sent for an image or table entity.
pub fn entity_request(entity: &Entity) -> Value {
    json!({
        "entity_id": entity.id,
        "type": entity.label.as_str(),
        "image_payload": entity.image_payload,
        "text": entity.value.text,
    })
}

pub fn category_request(text: &str) -> Value {
    json!({ "text_hash": content_hash_hex(text) })
}

#[derive(Debug, Clone, Default)]
pub struct FixtureUsefulness(pub Fixture);

impl UsefulnessClassifier for FixtureUsefulness {
    fn classify(&self, entity: &Entity) -> Result<UsefulnessVerdict> {
        let response = self
            .0
            .lookup(&entity_request(entity))
            .ok_or_else(|| Error::Client(format!("no usefulness fixture for {}", entity.id)))?;
        let verdict = response
            .get("verdict")
            .ok_or_else(|| Error::Client(format!("usefulness response for {} lacks a verdict", entity.id)))?;
        Ok(serde_json::from_value(verdict.clone())?)
    }
}

#[derive(Debug, Clone, Default)]
pub struct FixtureEnrichment(pub Fixture);

impl EnrichmentClient for FixtureEnrichment {
    fn enrich(&self, entity: &Entity) -> Result<EnrichmentResult> {
        let response = self
            .0
            .lookup(&entity_request(entity))
            .ok_or_else(|| Error::Client(format!("no enrichment fixture for {}", entity.id)))?;
        EnrichmentResult::from_response(response)
    }
}

#[derive(Debug, Clone, Default)]
pub struct FixtureCategory(pub Fixture);

impl CategoryClassifier for FixtureCategory {
    fn classify(&self, text: &str) -> Result<String> {
        self.0
            .lookup(&category_request(text))
            .and_then(|r| r.get("category"))
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Error::Client("no category fixture for text".into()))
    }
}

/// Enrichment over HTTP: POSTs the request record as JSON and reads a response record.
#[cfg(feature = "cli")]
#[derive(Debug, Clone)]
pub struct HttpEnrichment {
    pub url: String,
}

#[cfg(feature = "cli")]
impl HttpEnrichment {
    pub const ENV_VAR: &'static str = "LAYOUTKIT_ENRICHMENT_URL";

    pub fn from_env() -> Option<Self> {
        std::env::var(Self::ENV_VAR)
            .ok()
            .filter(|u| !u.trim().is_empty())
            .map(|url| Self { url })
    }
}

#[cfg(feature = "cli")]
impl EnrichmentClient for HttpEnrichment {
    fn enrich(&self, entity: &Entity) -> Result<EnrichmentResult> {
        let response: Value = ureq::post(&self.url)
            .send_json(entity_request(entity))
            .map_err(|e| Error::Client(e.to_string()))?
            .into_json()
            .map_err(|e| Error::Client(e.to_string()))?;
        EnrichmentResult::from_response(&response)
    }
}

/// Splits image entities into kept and skipped by usefulness verdict.
///
/// Tables and other labels bypass the classifier. A classifier error keeps the image.
pub fn gate_images(
    entities: Vec<Entity>,
    classifier: &dyn UsefulnessClassifier,
) -> (Vec<Entity>, Vec<String>) {
    let verdicts: Vec<Option<UsefulnessVerdict>> = entities
        .par_iter()
        .map(|e| {
            if e.label != ElementLabel::Image {
                return None;
            }
            match classifier.classify(e) {
                Ok(v) => Some(v),
                Err(err) => {
                    warn!("usefulness classifier failed for {}: {err}; keeping image", e.id);
                    None
                }
            }
        })
        .collect();

    let mut kept = Vec::with_capacity(entities.len());
    let mut skipped = Vec::new();
    for (entity, verdict) in entities.into_iter().zip(verdicts) {
        if verdict == Some(UsefulnessVerdict::Useless) {
            skipped.push(entity.id);
        } else {
            kept.push(entity);
        }
    }
    (kept, skipped)
}

/// Sends every table and every remaining image to `client`, merging replies into values.
///
/// Returns the entities and the number of attempted calls.
pub fn enrich_entities(entities: Vec<Entity>, client: &dyn EnrichmentClient) -> (Vec<Entity>, usize) {
    let replies: Vec<Option<Result<EnrichmentResult>>> = entities
        .par_iter()
        .map(|e| e.label.is_visual().then(|| client.enrich(e)))
        .collect();

    let mut calls = 0;
    let out = entities
        .into_iter()
        .zip(replies)
        .map(|(mut entity, reply)| {
            match reply {
                None => {}
                Some(Ok(result)) => {
                    calls += 1;
                    merge_enrichment(&mut entity, result);
                }
                Some(Err(err)) => {
                    calls += 1;
                    warn!("enrichment failed for {}: {err}; keeping OCR text", entity.id);
                }
            }
            entity
        })
        .collect();
    (out, calls)
}

fn merge_enrichment(entity: &mut Entity, result: EnrichmentResult) {
    let value = &mut entity.value;
    if result.title.is_some() {
        value.title = result.title;
    }
    if result.summary.is_some() {
        value.summary = result.summary;
    }
    match result.text_or_data {
        Some(TextOrData::Data(rows)) => value.data = Some(rows),
        Some(TextOrData::Text(text)) if value.text.trim().is_empty() => value.text = text,
        _ => {}
    }
}

/// Document category for `full_text`; any failure yields `"uncategorized"`.
pub fn classify_document(full_text: &str, classifier: &dyn CategoryClassifier) -> String {
    if full_text.trim().is_empty() {
        return UNCATEGORIZED.to_string();
    }
    match classifier.classify(full_text) {
        Ok(label) if !label.trim().is_empty() => label,
        Ok(_) => UNCATEGORIZED.to_string(),
        Err(err) => {
            warn!("category classifier failed: {err}");
            UNCATEGORIZED.to_string()
        }
    }
}
