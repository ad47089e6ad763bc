//! Self-contained SVG figures with a deterministic layout: correlation
//! chart, dimension-score scatter plots and per-group box plots with
//! significance stars.

use std::fmt::Write;

use super::analysis::{AnalysisReport, GroupTest};
use crate::stats::PcaModel;

const GLYPH_COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Significance stars: `***` < 0.001, `**` < 0.01, `*` < 0.05, else none.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open(w: f64, h: f64, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\" \
         font-family=\"sans-serif\" font-size=\"11\">\n<title>{}</title>\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        escape(title)
    )
}

/// Correlation chart: blue for positive, red for negative r, circle area
/// proportional to |r|; stars mark p < 0.05.
pub fn correlation_svg(names: &[String], r: &crate::stats::Matrix<f64>, p: &crate::stats::Matrix<f64>) -> String {
    let n = names.len();
    let cell = 34.0;
    let margin = 120.0;
    let size = margin + cell * n as f64 + 10.0;
    let mut s = open(size, size, "Pearson correlation matrix");
    for (i, name) in names.iter().enumerate() {
        let c = margin + cell * (i as f64 + 0.5);
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{c:.2}\" text-anchor=\"end\" dy=\"4\">{}</text>",
            margin - 6.0,
            escape(name)
        );
        let _ = writeln!(
            s,
            "<text transform=\"translate({c:.2},{:.2}) rotate(-60)\">{}</text>",
            margin - 6.0,
            escape(name)
        );
    }
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (margin + cell * j as f64, margin + cell * i as f64);
            let _ = writeln!(s, "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" fill=\"none\" stroke=\"#ddd\"/>");
            let v = r[(i, j)];
            let colour = if v >= 0.0 { "#2166ac" } else { "#b2182b" };
            let rad = (cell / 2.0 - 2.0) * v.abs().sqrt();
            let _ = writeln!(
                s,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{rad:.2}\" fill=\"{colour}\"/>",
                x + cell / 2.0,
                y + cell / 2.0
            );
            if i != j && !stars(p[(i, j)]).is_empty() {
                let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"9\">*</text>", x + 2.0, y + 9.0);
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

fn extent(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || hi <= lo {
        (lo.min(0.0) - 1.0, hi.max(0.0) + 1.0)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Scatter of component `i` against `j`, one point per drawing, glyph colour
/// per group (grey for unlabelled rows).
pub fn scatter_svg(model: &PcaModel<f64>, i: usize, j: usize, groups: &[String], index: &[Option<usize>]) -> String {
    let (w, h, m) = (420.0, 420.0, 50.0);
    let xs = model.scores.col(i);
    let ys = model.scores.col(j);
    let (x0, x1) = extent(&xs);
    let (y0, y1) = extent(&ys);
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = open(w, h, &format!("Dimension {} vs dimension {} scores", i + 1, j + 1));
    let _ = writeln!(
        s,
        "<rect x=\"{m:.2}\" y=\"{m:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
        w - 2.0 * m,
        h - 2.0 * m
    );
    let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">Dim {}</text>", w / 2.0, h - 15.0, i + 1);
    let _ = writeln!(
        s,
        "<text transform=\"translate(15,{:.2}) rotate(-90)\" text-anchor=\"middle\">Dim {}</text>",
        h / 2.0,
        j + 1
    );
    for (k, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
        let colour = index.get(k).copied().flatten().map_or("#999999", |g| GLYPH_COLOURS[g % GLYPH_COLOURS.len()]);
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{colour}\" fill-opacity=\"0.7\"/>",
            px(x),
            py(y)
        );
    }
    for (g, name) in groups.iter().enumerate() {
        let y = m + 14.0 * g as f64 + 10.0;
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{}\"/><text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            w - m - 60.0,
            GLYPH_COLOURS[g % GLYPH_COLOURS.len()],
            w - m - 52.0,
            y + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Box plot per group; each post-hoc pair with Holm p < 0.05 gets a
/// bracket labelled with its stars.
pub fn boxplot_svg(test: &GroupTest) -> String {
    let k = test.groups.len().max(1);
    let sig: Vec<_> = test.posthoc.iter().filter(|c| c.p_holm < 0.05).collect();
    let (m, slot) = (50.0, 80.0);
    let top = 30.0 + 18.0 * sig.len() as f64;
    let (w, h) = (2.0 * m + slot * k as f64, top + 260.0);
    let all: Vec<f64> = test.values.iter().flatten().copied().collect();
    let (y0, y1) = extent(&all);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - m - top);
    let cx = |g: usize| m + slot * (g as f64 + 0.5);
    let mut s = open(w, h, &format!("{} by group", test.target));
    let _ = writeln!(s, "<text x=\"{:.2}\" y=\"16\" text-anchor=\"middle\">{}</text>", w / 2.0, escape(&test.target));
    for (g, vals) in test.values.iter().enumerate() {
        let mut v = vals.clone();
        v.sort_by(f64::total_cmp);
        let name = test.groups.get(g).map_or("", String::as_str);
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{} (n={})</text>",
            cx(g),
            h - m + 18.0,
            escape(name),
            v.len()
        );
        if v.is_empty() {
            continue;
        }
        let [lo, q1, med, q3, hi] = [0.0, 0.25, 0.5, 0.75, 1.0].map(|q| quantile(&v, q));
        let (x, bw) = (cx(g), 24.0);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            py(lo),
            py(hi)
        );
        let _ = writeln!(
            s,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#c6dbef\" stroke=\"black\"/>",
            x - bw,
            py(q3),
            2.0 * bw,
            (py(q1) - py(q3)).max(0.5)
        );
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"2\"/>",
            x - bw,
            py(med),
            x + bw,
            py(med)
        );
    }
    for (n, c) in sig.iter().enumerate() {
        let y = top - 8.0 - 18.0 * n as f64;
        let (a, b) = (cx(c.group_a), cx(c.group_b));
        let _ = writeln!(
            s,
            "<path d=\"M{a:.2} {:.2} V{y:.2} H{b:.2} V{:.2}\" fill=\"none\" stroke=\"black\"/>\
             <text class=\"stars\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            y + 5.0,
            y + 5.0,
            (a + b) / 2.0,
            y - 2.0,
            stars(c.p_holm)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Every figure of an analysis report, keyed by bundle path.
pub fn render_figures(r: &AnalysisReport) -> Vec<(String, String)> {
    let mut out = vec![(
        "figures/correlation.svg".to_string(),
        correlation_svg(&r.correlation.names, &r.correlation.r, &r.correlation.p),
    )];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if j < r.step2.k {
            out.push((
                format!("figures/scores_dim{}_dim{}.svg", i + 1, j + 1),
                scatter_svg(&r.step2, i, j, &r.group_names, &r.group_index),
            ));
        }
    }
    for t in &r.tests {
        out.push((format!("figures/boxplot_{}.svg", t.target), boxplot_svg(t)));
    }
    out
}
