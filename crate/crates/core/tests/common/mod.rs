//! Fixture paths and helpers shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use layoutkit::ingest::clients::{Fixture, FixtureCategory, FixtureEnrichment, FixtureUsefulness};
use layoutkit::ingest::{load_detections, Thresholds};
use layoutkit::model::DocumentResult;
use layoutkit::pipeline::{process_document, Clients, PipelineConfig};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Config for the report fixture with every fixture-backed client enabled.
pub fn report_config() -> PipelineConfig {
    PipelineConfig {
        inputs: vec![fixture("report.json")],
        usefulness_fixture: Some(fixture("report_usefulness.json")),
        enrichment_fixture: Some(fixture("report_enrichment.json")),
        category_fixture: Some(fixture("report_category.json")),
        ..PipelineConfig::default()
    }
}

pub fn report_clients() -> Clients {
    Clients {
        usefulness: Some(Box::new(FixtureUsefulness(Fixture::load(&fixture("report_usefulness.json")).unwrap()))),
        enrichment: Some(Box::new(FixtureEnrichment(Fixture::load(&fixture("report_enrichment.json")).unwrap()))),
        category: Box::new(FixtureCategory(Fixture::load(&fixture("report_category.json")).unwrap())),
    }
}

/// The two-page report fixture run through gate, enrichment and assembly.
pub fn report_document() -> DocumentResult {
    let input = load_detections(&fixture("report.json"), Thresholds::default()).unwrap();
    process_document(&input, &report_config(), &report_clients()).unwrap()
}

pub fn offline_document(name: &str) -> DocumentResult {
    let input = load_detections(&fixture(name), Thresholds::default()).unwrap();
    process_document(&input, &PipelineConfig::default(), &Clients::offline()).unwrap()
}

/// Compares `actual` with a checked-in golden file, rewriting it instead when
/// `UPDATE_GOLDEN` is set.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        let line = expected
            .lines()
            .zip(actual.lines())
            .position(|(a, b)| a != b)
            .map_or_else(|| "length".to_string(), |i| format!("line {}", i + 1));
        Err(format!("{name} differs from golden at {line}"))
    }
}
