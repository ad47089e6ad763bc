//! `inkmetrics` command-line interface.
//!
//! Exit codes: 0 success, 2 invalid input or arguments, 3 statistical
//! degeneracy (too little data, zero variance, non-convergence), 1 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use inkmetrics::ink::{write_session_csv, write_sidecar_json};
use inkmetrics::pipeline::{
    compute_metrics, load_sessions, read_metrics_csv, run_analysis, run_compare, write_metrics_csv, PipelineConfig,
};
use inkmetrics::synth::{
    bits_session, gen_brownian, gen_corpus, gen_fgn_binary, gen_levy, gen_shape, CorpusSpec, ShapeSpec,
};
use inkmetrics::{DrawingSession, Error, Result, Simplification};
use log::{info, warn};

#[derive(Parser)]
#[command(name = "inkmetrics", version, about = "Metrics and dimension analysis for digital drawings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the per-drawing metric matrix for a directory of sessions.
    Metrics(MetricsArgs),
    /// Run the three-step PCA/varimax analysis on a metrics CSV.
    Analyze(AnalyzeArgs),
    /// Compare two metric datasets and find consensus dimensions.
    Compare(CompareArgs),
    /// Generate synthetic sessions with known ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
struct Common {
    /// JSON pipeline configuration; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    /// Directory of `X.csv` + `X.json` sessions (or self-contained JSON).
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Bin width of the pen-state series.
    #[arg(long)]
    dt_ms: Option<i64>,
    /// Ramer–Douglas–Peucker tolerance in pixels.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct AnalysisFlags {
    /// Number of retained components.
    #[arg(long)]
    k: Option<usize>,
    /// Minimum |loading| for a variable to survive pruning.
    #[arg(long)]
    threshold: Option<f64>,
    /// Metric columns to leave out of the analysis.
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<String>,
    /// Label defining the groups for group tests.
    #[arg(long)]
    group_by: Option<String>,
    /// Rotate without Kaiser row normalization.
    #[arg(long)]
    no_kaiser: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Metrics CSV written by `inkmetrics metrics`.
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    flags: AnalysisFlags,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    flags: AnalysisFlags,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SynthKind {
    Levy,
    Brownian,
    FgnBinary,
    Shape,
    Corpus,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    /// Power-law exponent (levy).
    #[arg(long, default_value_t = 2.0)]
    mu: f64,
    /// Step standard deviation in pixels (brownian).
    #[arg(long, default_value_t = 50.0)]
    sigma: f64,
    /// Hurst exponent (fgn_binary).
    #[arg(long, default_value_t = 0.7)]
    h: f64,
    /// Steps (levy, brownian), bins (fgn_binary) or drawings (corpus).
    #[arg(long)]
    n: Option<usize>,
    /// Random seed; `INKMETRICS_SEED` overrides it.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Session CSV (a `.json` sidecar is written next to it), or a directory
    /// for `corpus`.
    #[arg(long)]
    out: PathBuf,
}

fn load_config(common: &Common) -> Result<PipelineConfig> {
    match &common.config {
        Some(p) => Ok(serde_json::from_slice(&std::fs::read(p)?)?),
        None => Ok(PipelineConfig::default()),
    }
}

fn finish(mut cfg: PipelineConfig) -> Result<PipelineConfig> {
    cfg.apply_env()?;
    cfg.validate()?;
    Ok(cfg)
}

impl AnalysisFlags {
    fn apply(&self, cfg: &mut PipelineConfig) {
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(t) = self.threshold {
            cfg.loading_threshold = t;
        }
        if !self.exclude.is_empty() {
            cfg.exclude = self.exclude.clone();
        }
        if let Some(g) = &self.group_by {
            cfg.group_by = g.clone();
        }
        if self.no_kaiser {
            cfg.kaiser = false;
        }
    }
}

fn read_metrics(path: &Path) -> Result<inkmetrics::MetricMatrix<f64>> {
    read_metrics_csv(&std::fs::read(path)?).map_err(|e| with_file(path, e))
}

/// Prefixes validation and parse messages with the file they came from.
fn with_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
        Error::Validation { line, message } => {
            Error::Validation { line, message: format!("{}: {message}", path.display()) }
        }
        other => other,
    }
}

fn metrics(args: MetricsArgs) -> Result<()> {
    let mut cfg = load_config(&args.common)?;
    cfg.inputs = vec![args.input.clone()];
    if let Some(dt) = args.dt_ms {
        cfg.dt_ms = dt;
    }
    if let Some(eps) = args.epsilon {
        cfg.simplification = Simplification::Rdp { epsilon_px: eps };
    }
    let cfg = finish(cfg)?;
    let sessions = load_sessions(&args.input)?;
    info!("loaded {} sessions from {}", sessions.len(), args.input.display());
    let run = compute_metrics(&sessions, &cfg)?;
    for x in &run.excluded {
        warn!("excluded {}: {}", x.drawing_id, x.reason);
    }
    std::fs::create_dir_all(&args.common.out)?;
    std::fs::write(args.common.out.join("metrics.csv"), write_metrics_csv(&run.matrix)?)?;
    let report = serde_json::json!({ "excluded": run.excluded, "notes": run.notes });
    std::fs::write(args.common.out.join("exclusions.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    println!(
        "{} drawings, {} excluded -> {}",
        run.matrix.n_rows(),
        run.excluded.len(),
        args.common.out.join("metrics.csv").display()
    );
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let mut cfg = load_config(&args.common)?;
    cfg.inputs = vec![args.input.clone()];
    args.flags.apply(&mut cfg);
    let cfg = finish(cfg)?;
    let report = run_analysis(&read_metrics(&args.input)?, &cfg)?;
    for n in &report.notes {
        info!("{n}");
    }
    report.bundle.write_to(&args.common.out)?;
    println!(
        "k={} retained {} of {} variables ({:.1}% variance) -> {}",
        report.step2.k,
        report.step2.variables.len(),
        report.preprocessed.n_cols(),
        100.0 * report.step2.total_explained(),
        args.common.out.display()
    );
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let mut cfg = load_config(&args.common)?;
    cfg.inputs = vec![args.a.clone(), args.b.clone()];
    args.flags.apply(&mut cfg);
    let cfg = finish(cfg)?;
    let report = run_compare(&read_metrics(&args.a)?, &read_metrics(&args.b)?, &cfg)?;
    report.bundle.write_to(&args.common.out)?;
    println!("{} consensus variables -> {}", report.consensus.len(), args.common.out.display());
    Ok(())
}

fn write_session(path: &Path, s: &DrawingSession) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, write_session_csv(s))?;
    std::fs::write(path.with_extension("json"), write_sidecar_json(s))?;
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let mut cfg = PipelineConfig { seed: args.seed, ..PipelineConfig::default() };
    cfg.apply_env()?;
    let seed = cfg.seed;
    let session = match args.kind {
        SynthKind::Levy => gen_levy(args.mu, args.n.unwrap_or(5000), seed)?,
        SynthKind::Brownian => gen_brownian(args.sigma, args.n.unwrap_or(5000), seed)?,
        SynthKind::FgnBinary => {
            bits_session(&gen_fgn_binary(args.h, args.n.unwrap_or(4096), seed)?, &format!("fgn-s{seed}"))?
        }
        SynthKind::Shape => {
            let spec = ShapeSpec::new(1280, 800, vec![ShapeSpec::square([640.0, 400.0], 400.0, 0)]);
            gen_shape(&spec, seed)?
        }
        SynthKind::Corpus => {
            let spec = CorpusSpec { n_drawings: args.n.unwrap_or(345), seed, ..CorpusSpec::default() };
            let sessions = gen_corpus(&spec)?;
            for s in &sessions {
                write_session(&args.out.join(format!("{}.csv", s.session_id())), s)?;
            }
            println!("{} drawings -> {}", sessions.len(), args.out.display());
            return Ok(());
        }
    };
    write_session(&args.out, &session)?;
    println!("{} points in {} strokes -> {}", session.points().count(), session.strokes().len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Metrics(a) => metrics(a),
        Command::Analyze(a) => analyze(a),
        Command::Compare(a) => compare(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
