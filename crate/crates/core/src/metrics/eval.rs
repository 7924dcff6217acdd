//! Reference-vs-prediction scoring over DP-Bench files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dpbench::{read_file, DpBenchDocument, DpBenchElement, DpBenchFile, NID_EXCLUDED};
use crate::error::Result;

use super::table::parse_table_html;
use super::ted::{teds, teds_s};
use super::text::nid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[cfg_attr(feature = "cli", derive(clap::ValueEnum))]
pub enum EvalMode {
    Layout,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleScore {
    pub sample: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nid: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub teds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub teds_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub samples: Vec<SampleScore>,
    pub mean_nid: Option<f64>,
    pub mean_teds: Option<f64>,
    pub mean_teds_s: Option<f64>,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Reading-order text: non-table, non-figure, non-chart texts joined by newlines.
///
/// Elements with empty text contribute nothing.
pub fn serialize_for_nid(elements: &[DpBenchElement]) -> String {
    elements
        .iter()
        .filter(|e| !NID_EXCLUDED.contains(&e.category.as_str()) && !e.content.text.is_empty())
        .map(|e| e.content.text.as_str())
        .collect::<Vec<_>>()
        .join("\n")
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn score_layout(reference: &DpBenchFile, prediction: &DpBenchFile) -> EvalReport {
    let empty = DpBenchDocument::default();
    let samples: Vec<SampleScore> = reference
        .iter()
        .map(|(name, doc)| {
            let pred = prediction.get(name).unwrap_or(&empty);
            SampleScore {
                sample: name.clone(),
                nid: Some(nid(&serialize_for_nid(&doc.elements), &serialize_for_nid(&pred.elements))),
                teds: None,
                teds_s: None,
            }
        })
        .collect();
    let skipped = prediction.keys().filter(|k| !reference.contains_key(*k)).count();
    EvalReport {
        mode: EvalMode::Layout,
        mean_nid: mean(samples.iter().filter_map(|s| s.nid)),
        mean_teds: None,
        mean_teds_s: None,
        evaluated: samples.len(),
        skipped,
        samples,
    }
}

fn tables(doc: &DpBenchDocument) -> Vec<&DpBenchElement> {
    doc.elements.iter().filter(|e| e.category == "Table").collect()
}

/// Pairs each reference table with the unused same-page prediction of highest
/// positive IoU; ties go to the earlier prediction.
fn match_tables<'a>(refs: &[&DpBenchElement], preds: &[&'a DpBenchElement]) -> Vec<Option<&'a DpBenchElement>> {
    let mut used = vec![false; preds.len()];
    refs.iter()
        .map(|r| {
            let rb = r.bbox().ok()?;
            let mut best: Option<(usize, f64)> = None;
            for (i, p) in preds.iter().enumerate() {
                if used[i] || p.page != r.page {
                    continue;
                }
                let Ok(pb) = p.bbox() else { continue };
                let iou = rb.iou(&pb);
                if iou > 0.0 && best.is_none_or(|(_, b)| iou > b) {
                    best = Some((i, iou));
                }
            }
            best.map(|(i, _)| {
                used[i] = true;
                preds[i]
            })
        })
        .collect()
}

fn score_tables(reference: &DpBenchFile, prediction: &DpBenchFile) -> EvalReport {
    let empty = DpBenchDocument::default();
    let mut samples = Vec::new();
    let mut skipped = 0;
    for (name, doc) in reference {
        let ref_tables = tables(doc);
        if ref_tables.is_empty() {
            skipped += 1;
            continue;
        }
        let pred_tables = tables(prediction.get(name).unwrap_or(&empty));
        let matches = match_tables(&ref_tables, &pred_tables);
        for (k, (r, m)) in ref_tables.iter().zip(matches).enumerate() {
            let Some(ref_tree) = r.content.html.as_deref().and_then(|h| parse_table_html(h).ok()) else {
                log::warn!("{name}: reference table {k} has no parsable html; skipped");
                skipped += 1;
                continue;
            };
            let pred_tree = m.and_then(|p| p.content.html.as_deref()).and_then(|h| parse_table_html(h).ok());
            let (t, ts) = match pred_tree {
                Some(p) => (teds(&ref_tree, &p), teds_s(&ref_tree, &p)),
                None => (0.0, 0.0),
            };
            samples.push(SampleScore {
                sample: format!("{name}#table{k}"),
                nid: None,
                teds: Some(t),
                teds_s: Some(ts),
            });
        }
    }
    EvalReport {
        mode: EvalMode::Table,
        mean_nid: None,
        mean_teds: mean(samples.iter().filter_map(|s| s.teds)),
        mean_teds_s: mean(samples.iter().filter_map(|s| s.teds_s)),
        evaluated: samples.len(),
        skipped,
        samples,
    }
}

/// Scores already-loaded files.
pub fn evaluate_files(reference: &DpBenchFile, prediction: &DpBenchFile, mode: EvalMode) -> EvalReport {
    match mode {
        EvalMode::Layout => score_layout(reference, prediction),
        EvalMode::Table => score_tables(reference, prediction),
    }
}

pub fn evaluate(reference_path: &Path, prediction_path: &Path, mode: EvalMode) -> Result<EvalReport> {
    let reference = read_file(reference_path)?;
    let prediction = read_file(prediction_path)?;
    Ok(evaluate_files(&reference, &prediction, mode))
}

impl EvalReport {
    /// Plain-text table: one line per sample, then the means.
    pub fn summary(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
        let mut out = String::new();
        let _ = writeln!(out, "{:<40} {:>6} {:>6} {:>6}", "sample", "NID", "TEDS", "TEDS-S");
        for s in &self.samples {
            let _ = writeln!(out, "{:<40} {:>6} {:>6} {:>6}", s.sample, fmt(s.nid), fmt(s.teds), fmt(s.teds_s));
        }
        let _ = writeln!(out, "evaluated {} skipped {}", self.evaluated, self.skipped);
        match self.mode {
            EvalMode::Layout => {
                let _ = writeln!(out, "NID {}", fmt(self.mean_nid));
            }
            EvalMode::Table => {
                let _ = writeln!(out, "TEDS {}", fmt(self.mean_teds));
                let _ = writeln!(out, "TEDS-S {}", fmt(self.mean_teds_s));
            }
        }
        out
    }
}
