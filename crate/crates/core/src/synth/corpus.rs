//! Corpus of drawings with planted latent structure.
//!
//! Each drawing has three independent standard-normal latents:
//!
//! * efficiency `e`: step exponent `μ = 2 + 0.4e` and pen speed
//!   `0.8·exp(0.5e)` px/ms, which also sets drawn distance;
//! * colour diversity `c`: uses the `round(5.5 + 2.5c)` darkest palette
//!   colours, so count, mean and spread of intensity move together;
//! * sequentiality `s`: the drawing/pause pattern is fGn with Hurst exponent
//!   `0.72 + 0.12s` thresholded into 100 ms bins, so persistence and the
//!   number of sequences move together.
//!
//! Test time (40–80 s) and drawing proportion (0.4–0.7) are independent
//! nuisances. Stroke boundaries fall on 100 ms bin edges, which makes the
//! binary Gini exactly one minus the drawing-time proportion.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fgn::{fgn_with, threshold_bits};
use super::{pareto_step, place_step};
use crate::error::{Error, Result};
use crate::ink::{DrawingSession, Palette, Stroke, StrokePoint};

pub const CORPUS_GROUPS: [&str; 3] = ["g1", "g2", "g3"];
/// Efficiency shift per group, so group tests have something to find.
const GROUP_SHIFT: [f64; 3] = [-0.4, 0.0, 0.4];
const BIN_MS: i64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub n_drawings: usize,
    pub seed: u64,
    pub dataset: String,
    pub screen_w: u32,
    pub screen_h: u32,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self { n_drawings: 345, seed: 7, dataset: "synthetic".into(), screen_w: 1280, screen_h: 800 }
    }
}

/// Palette ids ordered by ascending mean channel intensity.
fn intensity_order(palette: &Palette) -> Vec<u8> {
    let mut ids: Vec<u8> = (0..palette.entries().len() as u8).collect();
    ids.sort_by_key(|&i| (palette.rgb(i).iter().map(|&v| u32::from(v)).sum::<u32>(), i));
    ids
}

fn latent(rng: &mut impl Rng) -> f64 {
    rng.sample::<f64, _>(StandardNormal).clamp(-2.5, 2.5)
}

/// Walk drawn at `speed` between `start_ms` and `end_ms`, continuing from
/// `at`. The final vertex lands exactly at `end_ms`, cut short if needed.
#[allow(clippy::too_many_arguments)]
fn stroke_walk(
    rng: &mut impl Rng,
    at: &mut (f64, f64),
    mu: f64,
    speed: f64,
    start_ms: i64,
    end_ms: i64,
    w: f64,
    h: f64,
) -> Vec<StrokePoint> {
    let mut points = vec![StrokePoint::new(start_ms, at.0, at.1)];
    let mut clock = start_ms as f64;
    loop {
        let last_t = points[points.len() - 1].t_ms;
        let len = pareto_step(rng, mu);
        let arrive = clock + len / speed;
        let t = (arrive.round() as i64).max(last_t + 1);
        if t >= end_ms {
            let remaining = (end_ms - last_t) as f64 * speed;
            *at = place_step(rng, *at, remaining, w, h);
            points.push(StrokePoint::new(end_ms, at.0, at.1));
            return points;
        }
        *at = place_step(rng, *at, len, w, h);
        points.push(StrokePoint::new(t, at.0, at.1));
        clock = arrive;
    }
}

fn gen_drawing(spec: &CorpusSpec, index: usize, seed: u64) -> Result<DrawingSession> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let group = index % CORPUS_GROUPS.len();
    let e = latent(&mut rng) + GROUP_SHIFT[group];
    let c = latent(&mut rng);
    let s = latent(&mut rng);
    let n_bins = rng.random_range(400..=800usize);
    let proportion = rng.random_range(0.4..0.7);

    let hurst = (0.72 + 0.12 * s).clamp(0.52, 0.92);
    let bits = threshold_bits(&fgn_with(hurst, n_bins, &mut rng)?, proportion)?;
    let bits = bits.bits();
    let first = bits.iter().position(|&b| b == 1).unwrap_or(0);
    let mut runs: Vec<(i64, i64)> = Vec::new();
    let mut i = first;
    while i < bits.len() {
        if bits[i] == 1 {
            let j = (i..bits.len()).find(|&j| bits[j] == 0).unwrap_or(bits.len());
            runs.push(((i - first) as i64 * BIN_MS, (j - first) as i64 * BIN_MS));
            i = j;
        } else {
            i += 1;
        }
    }
    if runs.is_empty() {
        return Err(Error::Degenerate("corpus drawing has no ink".into()));
    }

    let mu = (2.0 + 0.4 * e).clamp(1.2, 3.0);
    let speed = 0.8 * (0.5 * e).exp();
    let palette = Palette::default();
    let n_colours = ((5.5 + 2.5 * c).round() as usize).clamp(1, palette.entries().len());
    let colours = &intensity_order(&palette)[..n_colours];
    let offset = rng.random_range(0..n_colours);

    let (w, h) = (f64::from(spec.screen_w), f64::from(spec.screen_h));
    let mut at = (rng.random_range(0.25..0.75) * w, rng.random_range(0.25..0.75) * h);
    let strokes: Vec<Stroke> = runs
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let pts = stroke_walk(&mut rng, &mut at, mu, speed, a, b, w, h);
            Stroke::new(k as u32, colours[(offset + k) % n_colours], pts)
        })
        .collect();

    let labels = BTreeMap::from([
        ("dataset".to_string(), spec.dataset.clone()),
        ("group".to_string(), CORPUS_GROUPS[group].to_string()),
    ]);
    DrawingSession::new(format!("{}-{index:04}", spec.dataset), labels, spec.screen_w, spec.screen_h, palette, strokes)
}

/// Generates the corpus; drawing `i` depends only on `(spec, i)`.
pub fn gen_corpus(spec: &CorpusSpec) -> Result<Vec<DrawingSession>> {
    if spec.n_drawings == 0 {
        return Err(Error::InvalidArgument("corpus needs at least one drawing".into()));
    }
    let mut master = ChaCha8Rng::seed_from_u64(spec.seed);
    let seeds: Vec<u64> = (0..spec.n_drawings).map(|_| master.next_u64()).collect();
    seeds.par_iter().enumerate().map(|(i, &seed)| gen_drawing(spec, i, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colour::colour_summary;
    use crate::ink::binary_series;
    use crate::temporal::{gini_binary, temporal_summary, GiniVariant};

    fn small() -> CorpusSpec {
        CorpusSpec { n_drawings: 12, seed: 3, ..CorpusSpec::default() }
    }

    #[test]
    fn deterministic_and_valid() {
        let a = gen_corpus(&small()).unwrap();
        assert_eq!(a, gen_corpus(&small()).unwrap());
        assert_eq!(a.len(), 12);
        assert_eq!(a[1].labels()["group"], "g2");
    }

    #[test]
    fn gini_is_exactly_one_minus_proportion() {
        for s in gen_corpus(&small()).unwrap() {
            let g = gini_binary(&binary_series(&s, 100).unwrap(), GiniVariant::Population).unwrap();
            let p = temporal_summary(&s).drawing_time_proportion;
            assert!((g + p - 1.0).abs() < 1e-12, "{g} {p}");
        }
    }

    #[test]
    fn colour_counts_follow_the_plan() {
        for s in gen_corpus(&small()).unwrap() {
            let c = colour_summary(&s);
            assert!((1..=10).contains(&c.n_colours));
        }
    }
}
