mod common;

use layoutkit::assembly::correct_headers_footers;
use layoutkit::export::{Format, MarkdownOptions};
use layoutkit::metrics::EvalMode;
use layoutkit::model::SchemaWeights;
use layoutkit::pipeline::{eval_command, export_command, run_pipeline, write_exports, PipelineConfig};

use common::*;

#[test]
fn json_only_writes_one_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig { formats: vec![Format::Json], output_dir: dir.path().into(), ..report_config() };
    let summary = run_pipeline(&cfg).unwrap();
    let (_, files) = summary.documents[0].result.as_ref().unwrap();
    assert_eq!(files.len(), 1);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn skip_insights_makes_no_calls() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig { skip_insights: true, output_dir: dir.path().into(), ..report_config() };
    let summary = run_pipeline(&cfg).unwrap();
    let (doc, _) = summary.documents[0].result.as_ref().unwrap();
    assert_eq!(doc.total_llm_calls, 0);
    let table = &doc.pages[1].elements["p2-table"];
    assert!(table.value.data.is_none());
}

#[test]
fn enrichment_counts_calls_and_gate_skips_logo() {
    let doc = report_document();
    assert_eq!(doc.total_llm_calls, 2);
    assert_eq!(doc.document_category, "annual_report");
    assert_eq!(doc.pages[0].skipped_images, ["p1-logo"]);
    assert!(!doc.pages[0].elements.contains_key("p1-logo"));
    assert!(!doc.pages[0].elements.contains_key("p1-weak"));
    assert!(!doc.pages[0].elements.contains_key("p1-noise"));
    assert_eq!(doc.total_processed_pages + doc.total_failed_pages, doc.total_pages);
    doc.validate(&SchemaWeights::default()).unwrap();
}

#[test]
fn unreadable_input_does_not_stop_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        inputs: vec![fixture("missing.json"), fixture("columns.json")],
        output_dir: dir.path().into(),
        ..PipelineConfig::default()
    };
    let summary = run_pipeline(&cfg).unwrap();
    assert_eq!(summary.failed_documents(), 1);
    assert!(summary.documents[1].result.is_ok());
}

#[test]
fn correction_is_idempotent() {
    let doc = offline_document("bulletin.json");
    let again = correct_headers_footers(doc.pages.clone(), &Default::default(), &SchemaWeights::default());
    assert_eq!(again, doc.pages);
}

#[test]
fn export_command_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let doc = report_document();
    let json = write_exports(&doc, &[Format::Json], MarkdownOptions::default(), dir.path()).unwrap();
    let out = dir.path().join("again");
    let files = export_command(&json[0], &Format::ALL, MarkdownOptions::default(), &out, &SchemaWeights::default()).unwrap();
    assert_eq!(files.len(), 5);
    for f in &files {
        let body = std::fs::read_to_string(f).unwrap();
        if f.extension().unwrap() != "json" || !f.to_string_lossy().ends_with("report.json") {
            assert!(!body.contains("p1-logo"), "{}", f.display());
        }
    }
    assert_eq!(std::fs::read(&json[0]).unwrap(), std::fs::read(out.join("report.json")).unwrap());
}

#[test]
fn export_command_rejects_bad_results() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"filename": "x"}"#).unwrap();
    let err = export_command(&bad, &[Format::Markdown], MarkdownOptions::default(), dir.path(), &SchemaWeights::default())
        .unwrap_err();
    assert!(err.to_string().contains("parse error"), "{err}");

    let mut doc = report_document();
    doc.total_pages = 5;
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    assert!(export_command(&bad, &[Format::Markdown], MarkdownOptions::default(), dir.path(), &SchemaWeights::default())
        .is_err());
}

#[test]
fn eval_self_and_table_mode() {
    let dir = tempfile::tempdir().unwrap();
    let report = eval_command(&golden("report.dpbench.json"), &golden("report.dpbench.json"), EvalMode::Layout, Some(dir.path()))
        .unwrap();
    assert!(report.summary().contains("NID 1.00"));
    assert!(dir.path().join("eval_report.json").exists());

    let doc = offline_document("columns.json");
    let files = write_exports(&doc, &[Format::Dpbench], MarkdownOptions::default(), dir.path()).unwrap();
    let tables = eval_command(&files[0], &files[0], EvalMode::Table, None).unwrap();
    assert_eq!(tables.evaluated, 0);
    assert_eq!(tables.skipped, 1);
    assert!(eval_command(&fixture("missing.json"), &files[0], EvalMode::Layout, None).is_err());
}
