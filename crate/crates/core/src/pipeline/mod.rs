//! End-to-end workflow: per-drawing metrics, the three-step analysis,
//! cross-dataset comparison, and the report bundle (CSV, JSON, SVG).

mod analysis;
mod compare;
mod figures;
mod io;
mod metrics;
#[cfg(feature = "zenodo")]
mod zenodo;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segmentation::Simplification;
use crate::stats::PosthocMethod;
use crate::temporal::GiniVariant;

pub use analysis::{run_analysis, AnalysisReport, GroupTest};
pub use compare::{run_compare, CompareReport, ScoreCorrelation};
pub use figures::{boxplot_svg, correlation_svg, render_figures, scatter_svg, stars};
pub use io::{fmt_sig6, read_metrics_csv, round_sig6, write_metrics_csv};
pub use metrics::{compute_metrics, load_sessions, Exclusion, MetricsRun, METRIC_NAMES};
#[cfg(feature = "zenodo")]
pub use zenodo::load_zenodo;

/// Crate version recorded in every manifest.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub dt_ms: i64,
    pub simplification: Simplification,
    /// Include turning angles between the last step of one stroke and the
    /// first of the next.
    pub angles_across_strokes: bool,
    pub loading_threshold: f64,
    pub k: usize,
    pub gini: GiniVariant,
    pub posthoc: PosthocMethod,
    /// Columns removed before the first PCA (manual judgment calls).
    pub exclude: Vec<String>,
    /// Step 2 of the analysis: drop `time_proportion` (collinear with Gini).
    pub drop_time_proportion: bool,
    pub kaiser: bool,
    /// Label whose values define groups for the group tests.
    pub group_by: String,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            dt_ms: 100,
            simplification: Simplification::default(),
            angles_across_strokes: false,
            loading_threshold: 0.4,
            k: 3,
            gini: GiniVariant::Population,
            posthoc: PosthocMethod::MannWhitney,
            exclude: Vec::new(),
            drop_time_proportion: true,
            kaiser: true,
            group_by: "group".into(),
            output_dir: None,
            seed: 7,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dt_ms <= 0 {
            return Err(Error::InvalidArgument(format!("dt_ms must be positive, got {}", self.dt_ms)));
        }
        if !(self.loading_threshold > 0.0) {
            return Err(Error::InvalidArgument("loading threshold must be positive".into()));
        }
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!("k must be at least 2, got {}", self.k)));
        }
        let tol = match self.simplification {
            Simplification::Rdp { epsilon_px } => epsilon_px,
            Simplification::AngleThreshold { max_turn_deg } => max_turn_deg,
        };
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument("simplification tolerance must be positive".into()));
        }
        Ok(())
    }

    /// `INKMETRICS_SEED`, when set, overrides the configured seed.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var("INKMETRICS_SEED") {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("INKMETRICS_SEED is not an integer: '{v}'")))?;
        }
        Ok(())
    }
}

/// Report files keyed by path relative to the output directory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReportBundle {
    pub files: BTreeMap<String, String>,
}

impl ReportBundle {
    pub fn insert(&mut self, path: impl Into<String>, content: impl Into<String>) {
        self.files.insert(path.into(), content.into());
    }

    pub fn get(&self, path: &str) -> Option<&str> {
        self.files.get(path).map(String::as_str)
    }

    /// Nests another bundle under `prefix/`.
    pub fn merge_under(&mut self, prefix: &str, other: ReportBundle) {
        for (k, v) in other.files {
            self.files.insert(format!("{prefix}/{k}"), v);
        }
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        for (rel, content) in &self.files {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, content)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(PipelineConfig::default().validate().is_ok());
        assert!(PipelineConfig { k: 1, ..Default::default() }.validate().is_err());
        assert!(PipelineConfig { loading_threshold: 0.0, ..Default::default() }.validate().is_err());
        assert!(PipelineConfig { dt_ms: 0, ..Default::default() }.validate().is_err());
        let bad = PipelineConfig { simplification: Simplification::Rdp { epsilon_px: -1.0 }, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let c = PipelineConfig { exclude: vec!["sd_colour".into()], ..Default::default() };
        let back: PipelineConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let partial: PipelineConfig = serde_json::from_str(r#"{"k": 4}"#).unwrap();
        assert_eq!(partial.k, 4);
        assert_eq!(partial.dt_ms, 100);
    }

    #[test]
    fn bundle_writes_nested_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut b = ReportBundle::default();
        b.insert("a.txt", "x");
        let mut inner = ReportBundle::default();
        inner.insert("fig/b.svg", "<svg/>");
        b.merge_under("sub", inner);
        b.write_to(dir.path()).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("sub/fig/b.svg")).unwrap(), "<svg/>");
    }
}
