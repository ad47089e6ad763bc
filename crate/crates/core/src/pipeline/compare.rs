//! Cross-dataset third step: consensus variables, refits on each dataset
//! and on both together, score agreement between steps, and group contrasts.

use serde_json::json;

use super::analysis::{
    groups_of, loadings_csv, manifest_json, model_json, num, pca_options, pretty, run_analysis, scores_csv,
    split_by_group, test_json, AnalysisReport, GroupTest, POSTHOC_NOTE,
};
use super::figures::{boxplot_svg, scatter_svg};
use super::{PipelineConfig, ReportBundle};
use crate::error::{Error, Result};
use crate::stats::{
    consensus_variables, match_components, pca_varimax, pearson, pearson_p, posthoc_pairwise, Labels, MetricMatrix,
    PcaModel, PosthocMethod,
};

/// Agreement between a step-2 dimension and its matched step-3 dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreCorrelation {
    pub dataset: String,
    /// 1-based step-2 dimension.
    pub step2_dim: usize,
    /// 1-based matched step-3 dimension.
    pub step3_dim: usize,
    pub r: f64,
    pub t: f64,
    pub df: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub a: AnalysisReport,
    pub b: AnalysisReport,
    pub consensus: Vec<String>,
    pub step3_a: PcaModel<f64>,
    pub step3_b: PcaModel<f64>,
    pub step3_joint: PcaModel<f64>,
    pub correlations: Vec<ScoreCorrelation>,
    /// Mann–Whitney contrasts on joint scores and consensus metrics.
    pub group_tests: Vec<GroupTest>,
    pub bundle: ReportBundle,
}

fn score_correlations(name: &str, step2: &PcaModel<f64>, step3: &PcaModel<f64>) -> Result<Vec<ScoreCorrelation>> {
    let perm = match_components(step2, step3)?;
    let n = step2.scores.rows();
    Ok(perm
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let r = pearson(&step2.scores.col(j), &step3.scores.col(m));
            let df = n - 2;
            let t = r * (df as f64 / (1.0 - r * r).max(0.0)).sqrt();
            ScoreCorrelation {
                dataset: name.to_string(),
                step2_dim: j + 1,
                step3_dim: m + 1,
                r,
                t,
                df,
                p_value: pearson_p(r, n),
            }
        })
        .collect())
}

/// Stacks two matrices, prefixing row ids with `a:`/`b:` and recording the
/// origin in a `source` label.
fn stack(a: &MetricMatrix<f64>, b: &MetricMatrix<f64>) -> Result<MetricMatrix<f64>> {
    if a.col_names() != b.col_names() {
        return Err(Error::InvalidArgument("datasets have different columns".into()));
    }
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (tag, m) in [("a", a), ("b", b)] {
        for i in 0..m.n_rows() {
            ids.push(format!("{tag}:{}", m.row_ids()[i]));
            rows.push(m.values().row(i).to_vec());
            let mut l: Labels = m.labels()[i].clone();
            l.entry("source".into()).or_insert_with(|| tag.to_string());
            labels.push(l);
        }
    }
    MetricMatrix::new(ids, a.col_names().to_vec(), rows, labels)
}

fn contrast(target: &str, names: &[String], values: Vec<Vec<f64>>) -> GroupTest {
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
    match posthoc_pairwise(&t.values, PosthocMethod::MannWhitney) {
        Ok(p) => t.posthoc = p,
        Err(e) => t.error = Some(e.to_string()),
    }
    t
}

/// Third step of the workflow on two datasets analysed with one config.
pub fn run_compare(a: &MetricMatrix<f64>, b: &MetricMatrix<f64>, cfg: &PipelineConfig) -> Result<CompareReport> {
    let ra = run_analysis(a, cfg)?;
    let rb = run_analysis(b, cfg)?;
    let consensus = consensus_variables(&ra.step2, &rb.step2)?;
    if consensus.len() < cfg.k {
        return Err(Error::Degenerate(format!(
            "{} consensus variables cannot support {} components",
            consensus.len(),
            cfg.k
        )));
    }
    let opts = pca_options(cfg);
    let pa = ra.preprocessed.select_columns(&consensus)?;
    let pb = rb.preprocessed.select_columns(&consensus)?;
    let step3_a = pca_varimax(&pa, &opts)?;
    let step3_b = pca_varimax(&pb, &opts)?;
    let step3_joint = pca_varimax(&stack(&pa, &pb)?, &opts)?;

    let mut correlations = score_correlations("a", &ra.step2, &step3_a)?;
    correlations.extend(score_correlations("b", &rb.step2, &step3_b)?);

    let raw = stack(&a.select_columns(&consensus)?, &b.select_columns(&consensus)?)?;
    let (names, index) = groups_of(&raw, &cfg.group_by);
    let mut group_tests = Vec::new();
    if names.len() >= 2 {
        for j in 0..step3_joint.k {
            let vals = split_by_group(&step3_joint.scores.col(j), &index, names.len());
            group_tests.push(contrast(&format!("dim{}", j + 1), &names, vals));
        }
        for v in &consensus {
            let vals = split_by_group(&raw.column(v).expect("consensus column"), &index, names.len());
            group_tests.push(contrast(v, &names, vals));
        }
    } else {
        log::warn!("compare: label '{}' has fewer than 2 values; no group contrasts", cfg.group_by);
    }

    let mut report = CompareReport {
        a: ra,
        b: rb,
        consensus,
        step3_a,
        step3_b,
        step3_joint,
        correlations,
        group_tests,
        bundle: ReportBundle::default(),
    };
    report.bundle = compare_bundle(&report, cfg, &names);
    Ok(report)
}

fn compare_bundle(r: &CompareReport, cfg: &PipelineConfig, names: &[String]) -> ReportBundle {
    let mut b = ReportBundle::default();
    b.merge_under("a", r.a.bundle.clone());
    b.merge_under("b", r.b.bundle.clone());
    b.insert(
        "consensus.json",
        pretty(&json!({
            "consensus": r.consensus,
            "step2_a": r.a.step2.variables,
            "step2_b": r.b.step2.variables,
            "dropped": r.a.step2.variables.iter().chain(&r.b.step2.variables)
                .filter(|v| !r.consensus.contains(v))
                .collect::<std::collections::BTreeSet<_>>(),
            "step3_a": model_json(&r.step3_a),
            "step3_b": model_json(&r.step3_b),
            "step3_joint": model_json(&r.step3_joint),
        })),
    );
    b.insert("loadings_step3_a.csv", loadings_csv(&r.step3_a, |_| true));
    b.insert("loadings_step3_b.csv", loadings_csv(&r.step3_b, |_| true));
    b.insert("loadings_step3_joint.csv", loadings_csv(&r.step3_joint, |_| true));
    b.insert("scores_step3_joint.csv", scores_csv(&r.step3_joint));
    let corr: Vec<_> = r
        .correlations
        .iter()
        .map(|c| {
            json!({
                "dataset": c.dataset, "step2_dim": c.step2_dim, "step3_dim": c.step3_dim,
                "r": num(c.r), "t": num(c.t), "df": c.df, "p_value": num(c.p_value),
            })
        })
        .collect();
    b.insert("score_correlations.json", pretty(&json!(corr)));
    let tests: Vec<_> = r
        .group_tests
        .iter()
        .map(|t| {
            json!({
                "target": t.target,
                "sizes": t.sizes,
                "contrasts": t.posthoc.iter().map(|c| json!({
                    "a": names[c.group_a], "b": names[c.group_b],
                    "test": test_json(&c.test), "p_holm": num(c.p_holm),
                })).collect::<Vec<_>>(),
                "error": t.error,
            })
        })
        .collect();
    b.insert(
        "group_tests.json",
        pretty(&json!({ "group_by": cfg.group_by, "groups": names, "note": POSTHOC_NOTE, "tests": tests })),
    );
    let (_, index) = groups_of(&stack_labels_only(r), &cfg.group_by);
    b.insert("figures/scores_step3_dim1_dim2.svg", scatter_svg(&r.step3_joint, 0, 1, names, &index));
    for t in r.group_tests.iter().filter(|t| t.target.starts_with("dim")) {
        b.insert(format!("figures/boxplot_step3_{}.svg", t.target), boxplot_svg(t));
    }
    let files: Vec<&String> = b.files.keys().collect();
    b.insert(
        "manifest.json",
        pretty(&manifest_json(
            "compare",
            cfg,
            json!({ "n_a": r.a.input.n_rows(), "n_b": r.b.input.n_rows(), "files": files }),
        )),
    );
    b
}

/// Joint row labels in the order of the joint model's rows.
fn stack_labels_only(r: &CompareReport) -> MetricMatrix<f64> {
    let pick = |m: &MetricMatrix<f64>| m.select_columns(&[r.consensus[0].clone()]).expect("consensus column");
    stack(&pick(&r.a.input), &pick(&r.b.input)).expect("same single column")
}
