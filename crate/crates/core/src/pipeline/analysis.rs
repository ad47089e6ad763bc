//! The paper's within-dataset workflow: correlation screening, removal of
//! the Gini-collinear proportion, residualization on test time, rotated PCA,
//! pruning at the loading threshold, refit, and group tests.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::figures::render_figures;
use super::io::{fmt_sig6, round_sig6, write_metrics_csv};
use super::{PipelineConfig, ReportBundle, VERSION};
use crate::error::{Error, Result};
use crate::stats::{
    anova_oneway, kruskal_wallis, pca_varimax, pearson_matrix, posthoc_pairwise, prune_loadings, residualize,
    CorrelationMatrix, MetricMatrix, PairwiseComparison, PcaModel, PcaOptions, PosthocMethod, Rotation, TestResult,
};

pub(crate) const COVARIATE: &str = "test_time";
pub(crate) const COLLINEAR: &str = "time_proportion";
pub(crate) const POSTHOC_NOTE: &str = "post-hoc comparisons are pairwise tests with Holm correction, \
     not TukeyHSD or kruskalmc critical differences";

/// Group comparison of one dimension score or one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupTest {
    /// `dim1`.. for component scores, otherwise the metric name.
    pub target: String,
    pub groups: Vec<String>,
    pub sizes: Vec<usize>,
    pub kruskal: Option<TestResult<f64>>,
    pub anova: Option<TestResult<f64>>,
    pub posthoc: Vec<PairwiseComparison<f64>>,
    /// Kruskal–Wallis and ANOVA disagree about significance at 0.05.
    pub disagreement: bool,
    pub error: Option<String>,
    /// Per-group values, kept for the box plots.
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub input: MetricMatrix<f64>,
    pub correlation: CorrelationMatrix<f64>,
    /// After dropping the collinear column, residualizing and exclusions.
    pub preprocessed: MetricMatrix<f64>,
    pub step1: PcaModel<f64>,
    pub pruned: Vec<String>,
    pub step2: PcaModel<f64>,
    pub group_names: Vec<String>,
    /// Per input row, its index into `group_names`.
    pub group_index: Vec<Option<usize>>,
    pub tests: Vec<GroupTest>,
    pub notes: Vec<String>,
    pub bundle: ReportBundle,
}

pub(crate) fn pca_options(cfg: &PipelineConfig) -> PcaOptions {
    PcaOptions { rotation: Rotation::Varimax { kaiser: cfg.kaiser }, ..PcaOptions::with_k(cfg.k) }
}

/// Steps 2–4 of the workflow on a validated matrix.
pub(crate) fn preprocess(
    m: &MetricMatrix<f64>,
    cfg: &PipelineConfig,
    notes: &mut Vec<String>,
) -> Result<MetricMatrix<f64>> {
    let mut x = m.clone();
    if cfg.drop_time_proportion && x.col_index(COLLINEAR).is_some() {
        x = x.drop_columns(&[COLLINEAR.to_string()]);
        notes.push(format!("dropped {COLLINEAR} (collinear with gini)"));
    }
    if x.col_index(COVARIATE).is_some() {
        x = residualize(&x, COVARIATE)?;
        notes.push(format!("residualized every metric on {COVARIATE}"));
    } else {
        log::warn!("no {COVARIATE} column; skipping residualization");
        notes.push(format!("no {COVARIATE} column; residualization skipped"));
    }
    if let Some(bad) = cfg.exclude.iter().find(|c| x.col_index(c).is_none() && m.col_index(c).is_none()) {
        return Err(Error::InvalidArgument(format!("excluded column '{bad}' is not in the matrix")));
    }
    if !cfg.exclude.is_empty() {
        x = x.drop_columns(&cfg.exclude);
        notes.push(format!("manually excluded: {}", cfg.exclude.join(", ")));
    }
    Ok(x)
}

/// Fits the step-1 model, prunes, and refits (step 2).
pub(crate) fn fit_steps(
    x: &MetricMatrix<f64>,
    cfg: &PipelineConfig,
) -> Result<(PcaModel<f64>, Vec<String>, PcaModel<f64>)> {
    let opts = pca_options(cfg);
    let step1 = pca_varimax(x, &opts)?;
    let retained = prune_loadings(&step1, cfg.loading_threshold)?;
    if retained.len() < cfg.k {
        return Err(Error::Degenerate(format!(
            "only {} variables reach |loading| >= {}; {} components cannot be refitted",
            retained.len(),
            cfg.loading_threshold,
            cfg.k
        )));
    }
    let pruned: Vec<String> = step1.variables.iter().filter(|v| !retained.contains(v)).cloned().collect();
    let step2 = pca_varimax(&x.select_columns(&retained)?, &opts)?;
    Ok((step1, pruned, step2))
}

/// Distinct values of `tag` in sorted order and, per row, the group index.
pub(crate) fn groups_of(m: &MetricMatrix<f64>, tag: &str) -> (Vec<String>, Vec<Option<usize>>) {
    let names: Vec<String> = (0..m.n_rows())
        .filter_map(|i| m.label(i, tag).map(str::to_string))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = (0..m.n_rows()).map(|i| m.label(i, tag).and_then(|v| names.iter().position(|n| n == v))).collect();
    (names, index)
}

pub(crate) fn split_by_group(values: &[f64], index: &[Option<usize>], n_groups: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new(); n_groups];
    for (v, g) in values.iter().zip(index) {
        if let Some(g) = g {
            out[*g].push(*v);
        }
    }
    out
}

fn group_test(target: &str, names: &[String], values: Vec<Vec<f64>>, method: PosthocMethod) -> GroupTest {
    let mut t = GroupTest {
        target: target.to_string(),
        groups: names.to_vec(),
        sizes: values.iter().map(Vec::len).collect(),
        kruskal: None,
        anova: None,
        posthoc: Vec::new(),
        disagreement: false,
        error: None,
        values,
    };
    type Outcome = (TestResult<f64>, TestResult<f64>, Vec<PairwiseComparison<f64>>);
    let run = || -> Result<Outcome> {
        Ok((kruskal_wallis(&t.values)?, anova_oneway(&t.values)?, posthoc_pairwise(&t.values, method)?))
    };
    match run() {
        Ok((h, f, post)) => {
            t.disagreement = (h.p_value < 0.05) != (f.p_value < 0.05);
            t.kruskal = Some(h);
            t.anova = Some(f);
            t.posthoc = post;
        }
        Err(e) => t.error = Some(e.to_string()),
    }
    t
}

/// Runs the whole within-dataset workflow and renders its bundle.
pub fn run_analysis(m: &MetricMatrix<f64>, cfg: &PipelineConfig) -> Result<AnalysisReport> {
    cfg.validate()?;
    if m.n_rows() < 3 {
        return Err(Error::InsufficientData(format!("analysis needs at least 3 drawings, got {}", m.n_rows())));
    }
    let correlation = pearson_matrix(m)?;
    let mut notes = Vec::new();
    let preprocessed = preprocess(m, cfg, &mut notes)?;
    let (step1, pruned, step2) = fit_steps(&preprocessed, cfg)?;
    if !pruned.is_empty() {
        notes.push(format!("pruned below {}: {}", cfg.loading_threshold, pruned.join(", ")));
    }

    let (group_names, index) = groups_of(m, &cfg.group_by);
    let mut tests = Vec::new();
    if group_names.len() >= 2 {
        for j in 0..step2.k {
            let vals = split_by_group(&step2.scores.col(j), &index, group_names.len());
            tests.push(group_test(&format!("dim{}", j + 1), &group_names, vals, cfg.posthoc));
        }
        for v in &step2.variables {
            let col = m.column(v).expect("step-2 variables come from the input");
            let vals = split_by_group(&col, &index, group_names.len());
            tests.push(group_test(v, &group_names, vals, cfg.posthoc));
        }
    } else {
        notes.push(format!("group tests skipped: label '{}' has fewer than 2 values", cfg.group_by));
    }

    let mut report = AnalysisReport {
        input: m.clone(),
        correlation,
        preprocessed,
        step1,
        pruned,
        step2,
        group_names,
        group_index: index,
        tests,
        notes,
        bundle: ReportBundle::default(),
    };
    report.bundle = analysis_bundle(&report, cfg)?;
    Ok(report)
}

/// JSON number with six significant digits; non-finite values become null.
pub(crate) fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig6(x))
    } else {
        Value::Null
    }
}

pub(crate) fn test_json(t: &TestResult<f64>) -> Value {
    json!({
        "statistic": t.statistic,
        "value": num(t.value),
        "df": t.df.map(num),
        "df2": t.df2.map(num),
        "p_value": num(t.p_value),
        "method": t.method,
    })
}

pub(crate) fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

fn square_csv(names: &[String], m: &crate::stats::Matrix<f64>) -> String {
    let mut out = csv_line(&std::iter::once("variable".to_string()).chain(names.iter().cloned()).collect::<Vec<_>>());
    for (i, n) in names.iter().enumerate() {
        let row: Vec<String> = std::iter::once(n.clone()).chain(m.row(i).iter().map(|&v| fmt_sig6(v))).collect();
        out.push_str(&csv_line(&row));
    }
    out
}

/// `variable,dim1..dimk,assigned_dim,retained`; `assigned_dim` is 1-based.
pub(crate) fn loadings_csv(model: &PcaModel<f64>, retained: impl Fn(&str) -> bool) -> String {
    let mut header = vec!["variable".to_string()];
    header.extend((1..=model.k).map(|j| format!("dim{j}")));
    header.extend(["assigned_dim".to_string(), "retained".to_string()]);
    let mut out = csv_line(&header);
    for (i, v) in model.variables.iter().enumerate() {
        let mut row = vec![v.clone()];
        row.extend(model.loadings.row(i).iter().map(|&l| fmt_sig6(l)));
        row.push((model.assignment[v] + 1).to_string());
        row.push(retained(v).to_string());
        out.push_str(&csv_line(&row));
    }
    out
}

pub(crate) fn scores_csv(model: &PcaModel<f64>) -> String {
    let mut header = vec!["drawing_id".to_string()];
    header.extend((1..=model.k).map(|j| format!("dim{j}")));
    let mut out = csv_line(&header);
    for (i, id) in model.row_ids.iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend(model.scores.row(i).iter().map(|&s| fmt_sig6(s)));
        out.push_str(&csv_line(&row));
    }
    out
}

pub(crate) fn model_json(model: &PcaModel<f64>) -> Value {
    let assignment: BTreeMap<&str, usize> = model.assignment.iter().map(|(k, &v)| (k.as_str(), v + 1)).collect();
    json!({
        "variables": model.variables,
        "explained": model.explained.iter().map(|&e| num(e)).collect::<Vec<_>>(),
        "total_explained": num(model.total_explained()),
        "eigenvalues": model.eigenvalues.iter().map(|&e| num(e)).collect::<Vec<_>>(),
        "assignment": assignment,
        "varimax_sweeps": model.sweeps,
    })
}

pub(crate) fn group_tests_json(group_by: &str, names: &[String], tests: &[GroupTest], method: PosthocMethod) -> Value {
    let entries: Vec<Value> = tests
        .iter()
        .map(|t| {
            let post: Vec<Value> = t
                .posthoc
                .iter()
                .map(|c| {
                    json!({
                        "a": names[c.group_a],
                        "b": names[c.group_b],
                        "test": test_json(&c.test),
                        "p_holm": num(c.p_holm),
                    })
                })
                .collect();
            json!({
                "target": t.target,
                "sizes": t.sizes,
                "kruskal_wallis": t.kruskal.as_ref().map(test_json),
                "anova": t.anova.as_ref().map(test_json),
                "disagreement": t.disagreement,
                "posthoc": post,
                "error": t.error,
            })
        })
        .collect();
    json!({
        "group_by": group_by,
        "groups": names,
        "posthoc_method": method,
        "note": POSTHOC_NOTE,
        "tests": entries,
    })
}

pub(crate) fn manifest_json(command: &str, cfg: &PipelineConfig, extra: Value) -> Value {
    json!({
        "tool": "inkmetrics",
        "version": VERSION,
        "command": command,
        "seed": cfg.seed,
        "config": cfg,
        "details": extra,
    })
}

fn analysis_bundle(r: &AnalysisReport, cfg: &PipelineConfig) -> Result<ReportBundle> {
    let mut b = ReportBundle::default();
    b.insert("metrics.csv", write_metrics_csv(&r.input)?);
    b.insert("corr.csv", square_csv(&r.correlation.names, &r.correlation.r));
    b.insert("corr_p.csv", square_csv(&r.correlation.names, &r.correlation.p));
    let step2_vars = &r.step2.variables;
    b.insert("loadings_step1.csv", loadings_csv(&r.step1, |v| step2_vars.iter().any(|s| s == v)));
    b.insert("loadings_step2.csv", loadings_csv(&r.step2, |_| true));
    b.insert("scores_step1.csv", scores_csv(&r.step1));
    b.insert("scores_step2.csv", scores_csv(&r.step2));
    b.insert(
        "assignments.json",
        pretty(&json!({
            "threshold": num(cfg.loading_threshold),
            "step1": model_json(&r.step1),
            "pruned": r.pruned,
            "step2": model_json(&r.step2),
        })),
    );
    let tests = if r.group_names.len() >= 2 {
        group_tests_json(&cfg.group_by, &r.group_names, &r.tests, cfg.posthoc)
    } else {
        json!({ "group_by": cfg.group_by, "skipped": "fewer than 2 groups", "tests": [] })
    };
    b.insert("tests.json", pretty(&tests));
    for (path, svg) in render_figures(r) {
        b.insert(path, svg);
    }
    let files: Vec<&String> = b.files.keys().collect();
    let manifest = manifest_json(
        "analyze",
        cfg,
        json!({
            "n_drawings": r.input.n_rows(),
            "columns": r.input.col_names(),
            "notes": r.notes,
            "files": files,
        }),
    );
    b.insert("manifest.json", pretty(&manifest));
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::compute_metrics;
    use crate::synth::{gen_corpus, CorpusSpec};

    fn corpus_matrix(n: usize, seed: u64) -> MetricMatrix<f64> {
        let sessions = gen_corpus(&CorpusSpec { n_drawings: n, seed, ..CorpusSpec::default() }).unwrap();
        compute_metrics(&sessions, &PipelineConfig::default()).unwrap().matrix
    }

    #[test]
    fn bundle_contents_and_step_order() {
        let m = corpus_matrix(60, 2);
        let r = run_analysis(&m, &PipelineConfig::default()).unwrap();
        for f in [
            "metrics.csv",
            "corr.csv",
            "corr_p.csv",
            "loadings_step1.csv",
            "loadings_step2.csv",
            "scores_step1.csv",
            "scores_step2.csv",
            "assignments.json",
            "tests.json",
            "manifest.json",
            "figures/correlation.svg",
        ] {
            assert!(r.bundle.get(f).is_some(), "missing {f}");
        }
        assert!(!r.preprocessed.col_names().contains(&"time_proportion".to_string()));
        assert!(!r.preprocessed.col_names().contains(&"test_time".to_string()));
        assert_eq!(r.step1.variables.len(), 12);
        // No resurrection: step 2 uses only what step 1 retained.
        assert!(r.step2.variables.iter().all(|v| !r.pruned.contains(v)));
        assert!(r.step2.total_explained() >= r.step1.total_explained() - 1e-12 || !r.pruned.is_empty());
        let header = r.bundle.get("loadings_step1.csv").unwrap().lines().next().unwrap();
        assert_eq!(header, "variable,dim1,dim2,dim3,assigned_dim,retained");
        assert_eq!(r.tests.len(), 3 + r.step2.variables.len());
    }

    #[test]
    fn constant_column_is_rejected_by_name() {
        let m = corpus_matrix(10, 3);
        let rows: Vec<Vec<f64>> = (0..m.n_rows())
            .map(|i| {
                let mut r = m.values().row(i).to_vec();
                r[0] = 1.0;
                r
            })
            .collect();
        let flat = MetricMatrix::new(m.row_ids().to_vec(), m.col_names().to_vec(), rows, m.labels().to_vec()).unwrap();
        let e = run_analysis(&flat, &PipelineConfig::default()).unwrap_err();
        assert!(matches!(e, Error::ZeroVariance(_)));
        assert!(e.to_string().contains("mu_mle"));
    }

    #[test]
    fn exclusions_and_bad_names() {
        let m = corpus_matrix(40, 4);
        let cfg = PipelineConfig { exclude: vec!["sd_colour".into()], ..Default::default() };
        let r = run_analysis(&m, &cfg).unwrap();
        assert!(!r.step1.variables.contains(&"sd_colour".to_string()));
        let bad = PipelineConfig { exclude: vec!["nope".into()], ..Default::default() };
        assert!(matches!(run_analysis(&m, &bad), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rerun_is_byte_identical() {
        let m = corpus_matrix(30, 5);
        let a = run_analysis(&m, &PipelineConfig::default()).unwrap();
        let b = run_analysis(&m, &PipelineConfig::default()).unwrap();
        assert_eq!(a.bundle, b.bundle);
    }
}
