//! Browser bindings: page assembly with reading order, NID and TEDS.
//!
//! Each export wraps a plain function returning `Result<_, String>` so the
//! logic can be tested without a JavaScript host.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use layoutkit::assembly::{assemble_page, correct_headers_footers, AssemblyParams};
use layoutkit::export::{to_markdown, MarkdownOptions};
use layoutkit::ingest::{build_entities, filter_small_text, PageDetections, Thresholds};
use layoutkit::metrics::{nid, parse_table_html, teds, teds_s};
use layoutkit::model::{DocumentResult, PageResult, SchemaWeights};

#[derive(Serialize)]
struct Assembled {
    page: PageResult,
    order: Vec<String>,
    markdown: String,
}

#[derive(Serialize, Deserialize)]
pub struct TableScores {
    pub teds: f64,
    pub teds_s: f64,
}

/// Assembles one page of detections (the `pages[]` entry shape of an input file).
pub fn assemble(page_json: &str, eps: f64, angle_threshold: f64) -> Result<String, String> {
    let page: PageDetections = serde_json::from_str(page_json).map_err(|e| e.to_string())?;
    let thresholds = Thresholds::default();
    let input = layoutkit::ingest::DetectionInput {
        filename: "demo".into(),
        metadata: Default::default(),
        pages: vec![page],
    };
    input.validate().map_err(|e| e.to_string())?;
    let input = input.apply_thresholds(thresholds);
    let page = &input.pages[0];

    let mut params = AssemblyParams::default();
    params.cluster.eps = eps;
    params.row.angle_threshold_degrees = angle_threshold;
    let schema = SchemaWeights::default();
    let regions = page.layout_regions().map_err(|e| e.to_string())?;
    let entities = build_entities("demo", page, &schema).map_err(|e| e.to_string())?;
    let result = assemble_page(page.page_number, &regions, filter_small_text(entities), vec![], page.height, &params)
        .map_err(|e| e.to_string())?;
    let result = correct_headers_footers(vec![result], &params.header_footer, &schema).remove(0);

    let doc = DocumentResult {
        filename: "demo".into(),
        total_pages: 1,
        total_processed_pages: 1,
        total_failed_pages: 0,
        total_llm_calls: 0,
        metadata: Default::default(),
        document_category: "uncategorized".into(),
        pages: vec![result],
    };
    let markdown = to_markdown(&doc, MarkdownOptions::default());
    let page = doc.pages.into_iter().next().expect("one page");
    let order = page.elements.keys().cloned().collect();
    serde_json::to_string(&Assembled { page, order, markdown }).map_err(|e| e.to_string())
}

pub fn table_scores(reference_html: &str, prediction_html: &str) -> Result<TableScores, String> {
    let a = parse_table_html(reference_html).map_err(|e| format!("reference: {e}"))?;
    let b = parse_table_html(prediction_html).map_err(|e| format!("prediction: {e}"))?;
    Ok(TableScores { teds: teds(&a, &b), teds_s: teds_s(&a, &b) })
}

/// JSON `{page, order, markdown}` for one page of detections.
#[wasm_bindgen(js_name = assembleLayout)]
pub fn assemble_layout(page_json: &str, eps: f64, angle_threshold: f64) -> Result<String, JsValue> {
    assemble(page_json, eps, angle_threshold).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = nidScore)]
pub fn nid_score(reference: &str, prediction: &str) -> f64 {
    nid(reference, prediction)
}

/// JSON `{teds, teds_s}` for two table HTML strings.
#[wasm_bindgen(js_name = tedsScore)]
pub fn teds_score(reference_html: &str, prediction_html: &str) -> Result<String, JsValue> {
    table_scores(reference_html, prediction_html)
        .and_then(|s| serde_json::to_string(&s).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}
