//! End-to-end runs: detections in, DocumentResult and export files out.

use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_page, correct_headers_footers, AssemblyParams};
use crate::error::{read_json, Error, Result};
use crate::export::{chunks_to_ndjson, to_chunks, to_dpbench_file, to_graph, to_markdown, Format, MarkdownOptions};
use crate::ingest::clients::{
    classify_document, enrich_entities, gate_images, CategoryClassifier, ConstantCategory, EnrichmentClient, Fixture,
    FixtureCategory, FixtureEnrichment, FixtureUsefulness, UsefulnessClassifier,
};
use crate::ingest::{build_entities, filter_small_text, load_detections, DetectionInput, PageDetections, Thresholds};
use crate::metrics::{evaluate, EvalMode, EvalReport};
use crate::model::{DocumentResult, PageResult, SchemaWeights};

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn default_true() -> bool {
    true
}

fn default_formats() -> Vec<Format> {
    Format::ALL.to_vec()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Run configuration. Every field has a default, so a config file may be partial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub layout_threshold: f64,
    pub element_threshold: f64,
    /// Run the image usefulness gate and drop decorative images.
    #[serde(default = "default_true")]
    pub skip_images: bool,
    /// Disable table and image enrichment.
    pub skip_insights: bool,
    pub skip_headers_footers: bool,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    pub assembly: AssemblyParams,
    pub weights: SchemaWeights,
    pub usefulness_fixture: Option<PathBuf>,
    pub enrichment_fixture: Option<PathBuf>,
    pub category_fixture: Option<PathBuf>,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let t = Thresholds::default();
        Self {
            inputs: Vec::new(),
            output_dir: default_output_dir(),
            layout_threshold: t.layout,
            element_threshold: t.element,
            skip_images: true,
            skip_insights: false,
            skip_headers_footers: false,
            formats: default_formats(),
            assembly: AssemblyParams::default(),
            weights: SchemaWeights::default(),
            usefulness_fixture: None,
            enrichment_fixture: None,
            category_fixture: None,
            workers: default_workers(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("layout_threshold", self.layout_threshold), ("element_threshold", self.element_threshold)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!("{name} {v} outside [0, 1]")));
            }
        }
        if self.formats.is_empty() {
            return Err(Error::Validation("formats must not be empty".into()));
        }
        if self.workers == 0 {
            return Err(Error::Validation("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds { layout: self.layout_threshold, element: self.element_threshold }
    }

    /// Parses a TOML config file.
    #[cfg(feature = "cli")]
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
    }
}

/// External services used by a run. `None` disables the stage.
pub struct Clients {
    pub usefulness: Option<Box<dyn UsefulnessClassifier>>,
    pub enrichment: Option<Box<dyn EnrichmentClient>>,
    pub category: Box<dyn CategoryClassifier>,
}

impl Clients {
    /// No gate, no enrichment, constant category.
    pub fn offline() -> Self {
        Self { usefulness: None, enrichment: None, category: Box::new(ConstantCategory::default()) }
    }

    /// Fixture-backed clients where configured. Enrichment falls back to the
    /// HTTP endpoint in the environment, and is skipped when neither exists.
    pub fn from_config(cfg: &PipelineConfig) -> Result<Self> {
        let usefulness: Option<Box<dyn UsefulnessClassifier>> = match (&cfg.usefulness_fixture, cfg.skip_images) {
            (_, false) => None,
            (Some(p), true) => Some(Box::new(FixtureUsefulness(Fixture::load(p)?))),
            (None, true) => Some(Box::new(crate::ingest::clients::AlwaysUseful)),
        };
        let enrichment: Option<Box<dyn EnrichmentClient>> = match &cfg.enrichment_fixture {
            _ if cfg.skip_insights => None,
            Some(p) => Some(Box::new(FixtureEnrichment(Fixture::load(p)?))),
            None => http_enrichment(),
        };
        let category: Box<dyn CategoryClassifier> = match &cfg.category_fixture {
            Some(p) => Box::new(FixtureCategory(Fixture::load(p)?)),
            None => Box::new(ConstantCategory::default()),
        };
        Ok(Self { usefulness, enrichment, category })
    }
}

#[cfg(feature = "cli")]
fn http_enrichment() -> Option<Box<dyn EnrichmentClient>> {
    crate::ingest::clients::HttpEnrichment::from_env().map(|c| Box::new(c) as Box<dyn EnrichmentClient>)
}

#[cfg(not(feature = "cli"))]
fn http_enrichment() -> Option<Box<dyn EnrichmentClient>> {
    None
}

fn process_page(
    filename: &str,
    page: &PageDetections,
    cfg: &PipelineConfig,
    clients: &Clients,
) -> Result<(PageResult, usize)> {
    let regions = page.layout_regions()?;
    let entities = filter_small_text(build_entities(filename, page, &cfg.weights)?);
    let (entities, skipped) = match &clients.usefulness {
        Some(gate) => gate_images(entities, gate.as_ref()),
        None => (entities, Vec::new()),
    };
    let (entities, calls) = match &clients.enrichment {
        Some(client) => enrich_entities(entities, client.as_ref()),
        None => (entities, 0),
    };
    let result = assemble_page(page.page_number, &regions, entities, skipped, page.height, &cfg.assembly)?;
    Ok((result, calls))
}

/// Assembles every page of one input, then applies the cross-page header and
/// footer correction and classifies the document.
///
/// A failing page is logged and counted; the others are unaffected. Must run
/// inside the rayon pool that should do the page work.
pub fn process_document(input: &DetectionInput, cfg: &PipelineConfig, clients: &Clients) -> Result<DocumentResult> {
    input.validate()?;
    let mut pages: Vec<&PageDetections> = input.pages.iter().collect();
    pages.sort_by_key(|p| p.page_number);
    let outcomes: Vec<Result<(PageResult, usize)>> =
        pages.par_iter().map(|p| process_page(&input.filename, p, cfg, clients)).collect();

    let mut results = Vec::new();
    let mut calls = 0;
    let mut failed = 0;
    for (page, outcome) in pages.iter().zip(outcomes) {
        match outcome {
            Ok((result, n)) => {
                calls += n;
                results.push(result);
            }
            Err(err) => {
                warn!("{}: page {} failed: {err}", input.filename, page.page_number);
                failed += 1;
            }
        }
    }
    let results = correct_headers_footers(results, &cfg.assembly.header_footer, &cfg.weights);
    let full_text = results
        .iter()
        .flat_map(|p| p.elements.values().map(|e| e.value.content().trim()))
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join("\n");
    let document_category = classify_document(&full_text, clients.category.as_ref());
    Ok(DocumentResult {
        filename: input.filename.clone(),
        total_pages: pages.len(),
        total_processed_pages: results.len(),
        total_failed_pages: failed,
        total_llm_calls: calls,
        metadata: input.metadata.clone(),
        document_category,
        pages: results,
    })
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("export value serializes") + "\n"
}

/// Serialized form of one export.
pub fn render(doc: &DocumentResult, format: Format, opts: MarkdownOptions) -> String {
    match format {
        Format::Json => pretty(doc),
        Format::Markdown => to_markdown(doc, opts),
        Format::Chunks => chunks_to_ndjson(&to_chunks(doc)),
        Format::Graph => pretty(&to_graph(doc)),
        Format::Dpbench => pretty(&to_dpbench_file(doc)),
    }
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    use std::io::Write;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("output");
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// File stem for a document's outputs: its file name without extension.
pub fn output_stem(filename: &str) -> String {
    let stem = Path::new(filename).file_stem().and_then(|s| s.to_str()).unwrap_or("document");
    if stem.is_empty() { "document".into() } else { stem.to_string() }
}

/// Renders the selected formats concurrently and writes them, in format order.
pub fn write_exports(
    doc: &DocumentResult,
    formats: &[Format],
    opts: MarkdownOptions,
    output_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    std::fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;
    let stem = output_stem(&doc.filename);
    let rendered: Vec<(Format, String)> = formats.par_iter().map(|f| (*f, render(doc, *f, opts))).collect();
    rendered
        .into_iter()
        .map(|(f, body)| {
            let path = output_dir.join(format!("{stem}.{}", f.extension()));
            write_atomic(&path, body.as_bytes())?;
            Ok(path)
        })
        .collect()
}

#[derive(Debug)]
pub struct DocumentOutcome {
    pub input: PathBuf,
    pub result: Result<(DocumentResult, Vec<PathBuf>)>,
}

#[derive(Debug, Default)]
pub struct RunSummary {
    pub documents: Vec<DocumentOutcome>,
}

impl RunSummary {
    pub fn failed_documents(&self) -> usize {
        self.documents.iter().filter(|d| d.result.is_err()).count()
    }

    pub fn failed_pages(&self) -> usize {
        self.documents
            .iter()
            .filter_map(|d| d.result.as_ref().ok())
            .map(|(doc, _)| doc.total_failed_pages)
            .sum()
    }
}

/// Processes each input file in turn. A file that cannot be read or parsed is
/// reported in the summary and the run moves on.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let clients = Clients::from_config(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let opts = MarkdownOptions { skip_headers_footers: cfg.skip_headers_footers };
    let mut summary = RunSummary::default();
    for input in &cfg.inputs {
        let result = pool.install(|| {
            let detections = load_detections(input, cfg.thresholds())?;
            let doc = process_document(&detections, cfg, &clients)?;
            let files = write_exports(&doc, &cfg.formats, opts, &cfg.output_dir)?;
            Ok((doc, files))
        });
        match &result {
            Ok((doc, files)) => info!(
                "{}: {}/{} pages, {} files written",
                input.display(),
                doc.total_processed_pages,
                doc.total_pages,
                files.len()
            ),
            Err(err) => warn!("{}: {err}", input.display()),
        }
        summary.documents.push(DocumentOutcome { input: input.clone(), result });
    }
    Ok(summary)
}

/// Re-exports a saved DocumentResult without re-assembly.
pub fn export_command(
    json_path: &Path,
    formats: &[Format],
    opts: MarkdownOptions,
    output_dir: &Path,
    schema: &SchemaWeights,
) -> Result<Vec<PathBuf>> {
    let doc: DocumentResult = read_json(json_path)?;
    doc.validate(schema)?;
    write_exports(&doc, formats, opts, output_dir)
}

/// Scores a prediction file and, when `output_dir` is given, writes
/// `eval_report.json` and `eval_summary.txt` there.
pub fn eval_command(reference: &Path, prediction: &Path, mode: EvalMode, output_dir: Option<&Path>) -> Result<EvalReport> {
    let report = evaluate(reference, prediction, mode)?;
    if let Some(dir) = output_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let json = serde_json::to_string_pretty(&report)? + "\n";
        write_atomic(&dir.join("eval_report.json"), json.as_bytes())?;
        write_atomic(&dir.join("eval_summary.txt"), report.summary().as_bytes())?;
    }
    Ok(report)
}
