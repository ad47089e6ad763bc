//! Per-drawing metrics and their assembly into a [`MetricMatrix`].

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::PipelineConfig;
use crate::colour::colour_summary;
use crate::error::{Error, Result};
use crate::ink::{binary_series, parse_session, DrawingSession, SessionFormat, SessionMeta};
use crate::segmentation::{session_steps, turning_angles};
use crate::spatial::{
    angle_metric_fit, angle_metric_scores, convex_hull_coverage, drawing_distance, fit_mu_mle, AngleFit,
};
use crate::stats::MetricMatrix;
use crate::temporal::{entropy_cumsum, gini_binary, hurst_estimators, hurst_index, temporal_summary, HurstEstimate};

/// The fourteen metric columns, in matrix order.
pub const METRIC_NAMES: [&str; 14] = [
    "mu_mle",
    "drawing_distance",
    "angle_metric",
    "mcp_coverage",
    "hurst_index",
    "gini",
    "entropy",
    "test_time",
    "n_sequences",
    "speed",
    "time_proportion",
    "mean_colour",
    "sd_colour",
    "n_colours",
];

/// A drawing left out of the matrix, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exclusion {
    pub drawing_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRun {
    pub matrix: MetricMatrix<f64>,
    pub excluded: Vec<Exclusion>,
    /// Dataset-level caveats (fallbacks, variance shares).
    pub notes: Vec<String>,
}

struct PerDrawing {
    mu_mle: f64,
    distance: f64,
    angle: AngleFit<f64>,
    mcp: f64,
    hurst: HurstEstimate,
    gini: f64,
    entropy: f64,
    test_time: f64,
    n_sequences: f64,
    speed: f64,
    proportion: f64,
    mean_colour: f64,
    sd_colour: f64,
    n_colours: f64,
}

fn per_drawing(s: &DrawingSession, cfg: &PipelineConfig) -> Result<PerDrawing> {
    let steps = session_steps::<f64>(s, cfg.simplification);
    let fit = fit_mu_mle(&steps)?;
    let angle = angle_metric_fit(&turning_angles(&steps, cfg.angles_across_strokes))?;
    let bits = binary_series(s, cfg.dt_ms)?;
    let hurst = hurst_estimators(&bits)?;
    let gini = gini_binary(&bits, cfg.gini)?;
    let entropy = entropy_cumsum(s)?;
    let t = temporal_summary(s);
    let c = colour_summary(s);
    Ok(PerDrawing {
        mu_mle: fit.mu,
        distance: drawing_distance(s),
        angle,
        mcp: convex_hull_coverage(s),
        hurst,
        gini,
        entropy,
        test_time: t.test_time_ms as f64,
        n_sequences: t.n_sequences as f64,
        speed: t.speed_px_per_ms,
        proportion: t.drawing_time_proportion,
        mean_colour: c.mean_profile,
        sd_colour: c.sd_profile,
        n_colours: c.n_colours as f64,
    })
}

/// One row per drawing with the fourteen metrics. Drawings whose metrics
/// fail are excluded and reported, never imputed. The angle metric and
/// Hurst index are dataset-level; with fewer than three drawings they fall
/// back to coefficient `c` and the estimator mean, and a note says so.
pub fn compute_metrics(sessions: &[DrawingSession], cfg: &PipelineConfig) -> Result<MetricsRun> {
    cfg.validate()?;
    let results: Vec<Result<PerDrawing>> = sessions.par_iter().map(|s| per_drawing(s, cfg)).collect();
    let mut kept: Vec<(&DrawingSession, PerDrawing)> = Vec::new();
    let mut excluded = Vec::new();
    for (s, r) in sessions.iter().zip(results) {
        match r {
            Ok(m) => kept.push((s, m)),
            Err(e) => {
                log::warn!("excluding drawing '{}': {e}", s.session_id());
                excluded.push(Exclusion { drawing_id: s.session_id().to_string(), reason: e.to_string() });
            }
        }
    }

    let mut notes = Vec::new();
    let fits: Vec<AngleFit<f64>> = kept.iter().map(|(_, m)| m.angle).collect();
    let angle: Vec<f64> = if kept.len() >= 3 {
        let scores = angle_metric_scores(&fits)?;
        notes.push(format!("angle_metric: first component explains {:.1}% of (a, b, c)", 100.0 * scores.explained));
        scores.scores
    } else {
        notes.push("angle_metric: fewer than 3 drawings; using survival-fit coefficient c".into());
        fits.iter().map(|f| f.c).collect()
    };
    let hurst = hurst_index(&kept.iter().map(|(_, m)| m.hurst).collect::<Vec<_>>())?;
    match hurst.explained {
        Some(e) => notes.push(format!("hurst_index: first component explains {:.1}% of (h_dfa, h_rs)", 100.0 * e)),
        None => notes.push("hurst_index: fewer than 3 drawings; using the mean of h_dfa and h_rs".into()),
    }

    let rows: Vec<Vec<f64>> = kept
        .iter()
        .enumerate()
        .map(|(i, (_, m))| {
            vec![
                m.mu_mle,
                m.distance,
                angle[i],
                m.mcp,
                hurst.scores[i],
                m.gini,
                m.entropy,
                m.test_time,
                m.n_sequences,
                m.speed,
                m.proportion,
                m.mean_colour,
                m.sd_colour,
                m.n_colours,
            ]
        })
        .collect();
    let matrix = MetricMatrix::new(
        kept.iter().map(|(s, _)| s.session_id().to_string()).collect(),
        METRIC_NAMES.iter().map(|s| s.to_string()).collect(),
        rows,
        kept.iter().map(|(s, _)| s.labels().clone()).collect(),
    )?;
    Ok(MetricsRun { matrix, excluded, notes })
}

fn with_file(e: Error, path: &Path) -> Error {
    let f = path.display();
    match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{f}: {message}") },
        Error::Validation { line, message } => Error::Validation { line, message: format!("{f}: {message}") },
        other => other,
    }
}

fn load_one(csv: Option<&Path>, json: &Path) -> Result<DrawingSession> {
    let json_bytes = std::fs::read(json)?;
    match csv {
        Some(csv) => {
            let meta: SessionMeta = serde_json::from_slice(&json_bytes)
                .map_err(|e| Error::validation(format!("{}: bad sidecar: {e}", json.display())))?;
            let bytes = std::fs::read(csv)?;
            parse_session(&bytes, SessionFormat::Csv, Some(&meta)).map_err(|e| with_file(e, csv))
        }
        None => parse_session(&json_bytes, SessionFormat::Json, None).map_err(|e| with_file(e, json)),
    }
}

/// Loads every session in `dir`: `X.csv` with its `X.json` sidecar, and
/// self-contained `Y.json` sessions without a CSV. Files are read in name
/// order.
pub fn load_sessions(dir: &Path) -> Result<Vec<DrawingSession>> {
    let mut paths: Vec<PathBuf> =
        std::fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<std::io::Result<_>>()?;
    paths.sort();
    let ext = |p: &Path, e: &str| p.extension().and_then(|x| x.to_str()) == Some(e);
    let mut jobs: Vec<(Option<PathBuf>, PathBuf)> = Vec::new();
    for p in &paths {
        if ext(p, "csv") {
            let sidecar = p.with_extension("json");
            if !sidecar.exists() {
                return Err(Error::validation(format!("{}: missing sidecar {}", p.display(), sidecar.display())));
            }
            jobs.push((Some(p.clone()), sidecar));
        } else if ext(p, "json") && !p.with_extension("csv").exists() {
            jobs.push((None, p.clone()));
        }
    }
    if jobs.is_empty() {
        return Err(Error::InsufficientData(format!("no sessions found in {}", dir.display())));
    }
    jobs.par_iter().map(|(c, j)| load_one(c.as_deref(), j)).collect()
}
