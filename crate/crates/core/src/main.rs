use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use layoutkit::export::{Format, MarkdownOptions};
use layoutkit::metrics::EvalMode;
use layoutkit::pipeline::{eval_command, export_command, run_pipeline, PipelineConfig};

#[derive(Parser)]
#[command(name = "layoutkit", version, about = "Layout-aware document parsing, export and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble detection files into document results and exports.
    Parse(ParseArgs),
    /// Re-run exporters over a saved document result.
    Export(ExportArgs),
    /// Score a DP-Bench prediction file against a reference.
    Eval(EvalArgs),
}

#[derive(Args)]
struct ParseArgs {
    /// Detection JSON files.
    inputs: Vec<PathBuf>,
    /// TOML config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    layout_threshold: Option<f64>,
    #[arg(long)]
    element_threshold: Option<f64>,
    /// Gate images through the usefulness classifier.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    skip_images: Option<bool>,
    /// Skip table and image enrichment.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    skip_insights: Option<bool>,
    /// Leave page headers and footers out of the Markdown.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    skip_headers_footers: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    formats: Option<Vec<Format>>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    min_samples: Option<usize>,
    /// Line-angle threshold for row groups, in degrees.
    #[arg(long)]
    angle_threshold: Option<f64>,
    #[arg(long)]
    fuzzy_threshold: Option<u32>,
    #[arg(long)]
    usefulness_fixture: Option<PathBuf>,
    #[arg(long)]
    enrichment_fixture: Option<PathBuf>,
    #[arg(long)]
    category_fixture: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Document result JSON written by `parse`.
    json: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "markdown,chunks,graph,dpbench")]
    formats: Vec<Format>,
    #[arg(short, long, default_value = "out")]
    output_dir: PathBuf,
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value = "false")]
    skip_headers_footers: bool,
    /// TOML config supplying the weight schema the result was built with.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    reference: PathBuf,
    prediction: PathBuf,
    #[arg(long, value_enum, default_value = "layout")]
    mode: EvalMode,
    /// Also write eval_report.json and eval_summary.txt here.
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
}

const USAGE: u8 = 2;
const FAILURE: u8 = 1;

fn build_config(a: ParseArgs) -> Result<PipelineConfig, String> {
    let mut cfg = match &a.config {
        Some(p) => PipelineConfig::from_toml_file(p).map_err(|e| e.to_string())?,
        None => PipelineConfig::default(),
    };
    if !a.inputs.is_empty() {
        cfg.inputs = a.inputs;
    }
    macro_rules! set {
        ($($flag:expr => $field:expr),* $(,)?) => {
            $(if let Some(v) = $flag { $field = v; })*
        };
    }
    set! {
        a.output_dir => cfg.output_dir,
        a.layout_threshold => cfg.layout_threshold,
        a.element_threshold => cfg.element_threshold,
        a.skip_images => cfg.skip_images,
        a.skip_insights => cfg.skip_insights,
        a.skip_headers_footers => cfg.skip_headers_footers,
        a.formats => cfg.formats,
        a.workers => cfg.workers,
        a.eps => cfg.assembly.cluster.eps,
        a.min_samples => cfg.assembly.cluster.min_samples,
        a.angle_threshold => cfg.assembly.row.angle_threshold_degrees,
        a.fuzzy_threshold => cfg.assembly.header_footer.fuzzy_threshold,
    }
    if a.usefulness_fixture.is_some() {
        cfg.usefulness_fixture = a.usefulness_fixture;
    }
    if a.enrichment_fixture.is_some() {
        cfg.enrichment_fixture = a.enrichment_fixture;
    }
    if a.category_fixture.is_some() {
        cfg.category_fixture = a.category_fixture;
    }
    if cfg.inputs.is_empty() {
        return Err("no input files given".into());
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn parse(args: ParseArgs) -> ExitCode {
    let cfg = match build_config(args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(USAGE);
        }
    };
    let summary = match run_pipeline(&cfg) {
        Ok(s) => s,
        Err(e) => {
            error!("{e}");
            return ExitCode::from(FAILURE);
        }
    };
    for doc in &summary.documents {
        match &doc.result {
            Ok((result, files)) => {
                println!(
                    "{}: {} of {} pages, {} failed, {} enrichment calls",
                    doc.input.display(),
                    result.total_processed_pages,
                    result.total_pages,
                    result.total_failed_pages,
                    result.total_llm_calls
                );
                for f in files {
                    println!("  {}", f.display());
                }
            }
            Err(e) => eprintln!("{}: failed: {e}", doc.input.display()),
        }
    }
    if summary.failed_documents() > 0 {
        ExitCode::from(FAILURE)
    } else {
        ExitCode::SUCCESS
    }
}

fn export(a: ExportArgs) -> ExitCode {
    let cfg = match &a.config {
        Some(p) => match PipelineConfig::from_toml_file(p) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(USAGE);
            }
        },
        None => PipelineConfig::default(),
    };
    let opts = MarkdownOptions { skip_headers_footers: a.skip_headers_footers };
    match export_command(&a.json, &a.formats, opts, &a.output_dir, &cfg.weights) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(FAILURE)
        }
    }
}

fn eval(a: EvalArgs) -> ExitCode {
    match eval_command(&a.reference, &a.prediction, a.mode, a.output_dir.as_deref()) {
        Ok(report) => {
            print!("{}", report.summary());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(FAILURE)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Parse(a) => parse(a),
        Command::Export(a) => export(a),
        Command::Eval(a) => eval(a),
    }
}
