//! Synthetic sessions and series with known ground truth.

mod corpus;
mod fgn;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ink::{DrawingSession, Palette, Stroke, StrokePoint};
use crate::temporal::BinarySeries;

pub use corpus::{gen_corpus, CorpusSpec, CORPUS_GROUPS};
pub use fgn::{fgn_autocovariance, gen_fgn, gen_fgn_binary};

/// Screen of the single-walk generators; large enough that almost no
/// power-law step needs folding at μ ≥ 1.5.
pub const WALK_SCREEN: (u32, u32) = (4096, 4096);
/// Pen speed of the single-walk generators.
pub const WALK_SPEED_PX_PER_MS: f64 = 1.0;
const HEADING_TRIES: usize = 64;

/// Reflects `v` into `[0, max]`.
fn fold(v: f64, max: f64) -> f64 {
    let period = 2.0 * max;
    let r = v.rem_euclid(period);
    if r > max {
        period - r
    } else {
        r
    }
}

/// Places a step of `len` from `from`, trying random headings until one
/// stays on screen, otherwise reflecting the endpoint at the borders.
pub(crate) fn place_step(rng: &mut impl Rng, from: (f64, f64), len: f64, w: f64, h: f64) -> (f64, f64) {
    for _ in 0..HEADING_TRIES {
        let a = rng.random::<f64>() * std::f64::consts::TAU;
        let (x, y) = (from.0 + len * a.cos(), from.1 + len * a.sin());
        if (0.0..=w).contains(&x) && (0.0..=h).contains(&y) {
            return (x, y);
        }
    }
    let a = rng.random::<f64>() * std::f64::consts::TAU;
    (fold(from.0 + len * a.cos(), w), fold(from.1 + len * a.sin(), h))
}

/// Pareto step length above 10 px via the inverse CDF.
pub(crate) fn pareto_step(rng: &mut impl Rng, mu: f64) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    10.0 * u.powf(-1.0 / (mu - 1.0))
}

/// Single-stroke walk whose vertices are the given step endpoints, drawn at
/// constant speed (each vertex at least 1 ms after the previous).
fn walk_session(id: &str, vertices: Vec<(f64, f64)>, labels: BTreeMap<String, String>) -> Result<DrawingSession> {
    let mut t = 0i64;
    let mut cum = 0.0;
    let mut points = Vec::with_capacity(vertices.len());
    for (i, &(x, y)) in vertices.iter().enumerate() {
        if i > 0 {
            let (px, py) = vertices[i - 1];
            cum += (x - px).hypot(y - py);
            t = ((cum / WALK_SPEED_PX_PER_MS).round() as i64).max(t + 1);
        }
        points.push(StrokePoint::new(t, x, y));
    }
    DrawingSession::new(id, labels, WALK_SCREEN.0, WALK_SCREEN.1, Palette::default(), vec![Stroke::new(0, 0, points)])
}

fn walk_labels(kind: &str) -> BTreeMap<String, String> {
    BTreeMap::from([("dataset".to_string(), "synthetic".to_string()), ("kind".to_string(), kind.to_string())])
}

/// Lévy walk: Pareto step lengths (`xmin = 10`, exponent `mu`), uniform
/// headings, one stroke in black at constant speed. Raw points are exactly
/// the step vertices.
pub fn gen_levy(mu: f64, n_steps: usize, seed: u64) -> Result<DrawingSession> {
    if !(mu > 1.0 && mu <= 3.0) {
        return Err(Error::InvalidArgument(format!("mu must lie in (1, 3], got {mu}")));
    }
    if n_steps < 10 {
        return Err(Error::InvalidArgument(format!("n_steps must be at least 10, got {n_steps}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (f64::from(WALK_SCREEN.0), f64::from(WALK_SCREEN.1));
    let mut at = (w / 2.0, h / 2.0);
    let mut vertices = vec![at];
    for _ in 0..n_steps {
        let len = pareto_step(&mut rng, mu);
        at = place_step(&mut rng, at, len, w, h);
        vertices.push(at);
    }
    walk_session(&format!("levy-mu{mu}-s{seed}"), vertices, walk_labels("levy"))
}

/// Brownian walk: isotropic Gaussian displacements with per-axis SD
/// `step_sigma`, reflected at the screen borders.
pub fn gen_brownian(step_sigma: f64, n_steps: usize, seed: u64) -> Result<DrawingSession> {
    if !(step_sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("step_sigma must be positive, got {step_sigma}")));
    }
    if n_steps < 10 {
        return Err(Error::InvalidArgument(format!("n_steps must be at least 10, got {n_steps}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, step_sigma).expect("positive sigma");
    let (w, h) = (f64::from(WALK_SCREEN.0), f64::from(WALK_SCREEN.1));
    let mut at = (w / 2.0, h / 2.0);
    let mut vertices = vec![at];
    for _ in 0..n_steps {
        let (dx, dy) = (normal.sample(&mut rng), normal.sample(&mut rng));
        at = (fold(at.0 + dx, w), fold(at.1 + dy, h));
        vertices.push(at);
    }
    walk_session(&format!("brownian-s{seed}"), vertices, walk_labels("brownian"))
}

/// One stroke of a shape: a polyline in one colour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeStroke {
    pub colour_id: u8,
    pub vertices: Vec<[f64; 2]>,
}

/// Polyline drawing description for fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub screen_w: u32,
    pub screen_h: u32,
    pub strokes: Vec<ShapeStroke>,
    /// Spacing of the raw points sampled along each edge.
    pub sample_px: f64,
    pub speed_px_per_ms: f64,
    pub gap_ms: i64,
    /// Uniform positional noise amplitude; 0 for exact shapes.
    pub jitter_px: f64,
}

impl ShapeSpec {
    pub fn new(screen_w: u32, screen_h: u32, strokes: Vec<ShapeStroke>) -> Self {
        Self { screen_w, screen_h, strokes, sample_px: 2.0, speed_px_per_ms: 1.0, gap_ms: 300, jitter_px: 0.0 }
    }

    /// Square of side `side` centred at `c`, traced from the midpoint of its
    /// bottom edge back to that midpoint, so all four corners are turns.
    pub fn square(c: [f64; 2], side: f64, colour_id: u8) -> ShapeStroke {
        let r = side / 2.0;
        let v = vec![
            [c[0], c[1] - r],
            [c[0] + r, c[1] - r],
            [c[0] + r, c[1] + r],
            [c[0] - r, c[1] + r],
            [c[0] - r, c[1] - r],
            [c[0], c[1] - r],
        ];
        ShapeStroke { colour_id, vertices: v }
    }

    pub fn line(a: [f64; 2], b: [f64; 2], colour_id: u8) -> ShapeStroke {
        ShapeStroke { colour_id, vertices: vec![a, b] }
    }
}

/// Renders a shape as a session: each edge sampled every `sample_px`,
/// timestamps at constant speed, `gap_ms` between strokes.
pub fn gen_shape(spec: &ShapeSpec, seed: u64) -> Result<DrawingSession> {
    if !(spec.sample_px > 0.0 && spec.speed_px_per_ms > 0.0) || spec.gap_ms < 0 {
        return Err(Error::InvalidArgument("shape sampling, speed and gap must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (f64::from(spec.screen_w), f64::from(spec.screen_h));
    let mut t = 0i64;
    let mut strokes = Vec::with_capacity(spec.strokes.len());
    for (i, s) in spec.strokes.iter().enumerate() {
        let mut samples: Vec<[f64; 2]> = Vec::new();
        for (j, v) in s.vertices.iter().enumerate() {
            if j == 0 {
                samples.push(*v);
                continue;
            }
            let p = s.vertices[j - 1];
            let len = (v[0] - p[0]).hypot(v[1] - p[1]);
            let k = ((len / spec.sample_px).ceil() as usize).max(1);
            for q in 1..=k {
                let f = q as f64 / k as f64;
                samples.push([p[0] + f * (v[0] - p[0]), p[1] + f * (v[1] - p[1])]);
            }
        }
        let mut points = Vec::with_capacity(samples.len());
        let mut prev: Option<[f64; 2]> = None;
        for raw in samples {
            let mut q = raw;
            if spec.jitter_px > 0.0 {
                q[0] = (q[0] + spec.jitter_px * (2.0 * rng.random::<f64>() - 1.0)).clamp(0.0, w);
                q[1] = (q[1] + spec.jitter_px * (2.0 * rng.random::<f64>() - 1.0)).clamp(0.0, h);
            }
            if let Some(p) = prev {
                let dt = ((q[0] - p[0]).hypot(q[1] - p[1]) / spec.speed_px_per_ms).round() as i64;
                t += dt.max(1);
            }
            points.push(StrokePoint::new(t, q[0], q[1]));
            prev = Some(q);
        }
        strokes.push(Stroke::new(i as u32, s.colour_id, points));
        t += spec.gap_ms.max(1);
    }
    DrawingSession::new(
        format!("shape-s{seed}"),
        walk_labels("shape"),
        spec.screen_w,
        spec.screen_h,
        Palette::default(),
        strokes,
    )
}

/// Width of one row of the serpentine path used by [`bits_session`].
const SERPENTINE_ROW_PX: f64 = 4000.0;
const SERPENTINE_PX_PER_BIN: f64 = 10.0;

/// Point at arc length `d` along a left-right-left serpentine of 16 px rows.
fn serpentine(d: f64) -> (f64, f64) {
    let row = (d / SERPENTINE_ROW_PX).floor();
    let along = d - row * SERPENTINE_ROW_PX;
    let x = if row as i64 % 2 == 0 { along } else { SERPENTINE_ROW_PX - along };
    (48.0 + x, 8.0 + 16.0 * row)
}

/// Renders a binary pen-state series as a session: every run of ones is a
/// stroke whose endpoints fall on bin edges, so `binary_series` at the same
/// `dt` recovers the bits (minus leading and trailing zeros). Ink advances
/// 10 px per bin along a serpentine path.
pub fn bits_session(series: &BinarySeries, id: &str) -> Result<DrawingSession> {
    let bits = series.bits();
    let dt = series.dt_ms();
    let first = bits.iter().position(|&b| b == 1).ok_or_else(|| Error::Degenerate("series has no ones".into()))?;
    let mut strokes = Vec::new();
    let mut ink_bins = 0usize;
    let mut i = first;
    while i < bits.len() {
        if bits[i] == 0 {
            i += 1;
            continue;
        }
        let j = (i..bits.len()).find(|&j| bits[j] == 0).unwrap_or(bits.len());
        let points = (i..=j)
            .map(|b| {
                let (x, y) = serpentine((ink_bins + b - i) as f64 * SERPENTINE_PX_PER_BIN);
                StrokePoint::new((b - first) as i64 * dt, x, y)
            })
            .collect();
        ink_bins += j - i;
        strokes.push(Stroke::new(strokes.len() as u32, 0, points));
        i = j;
    }
    DrawingSession::new(id, walk_labels("fgn_binary"), WALK_SCREEN.0, WALK_SCREEN.1, Palette::default(), strokes)
}

/// What `inkmetrics synth` generates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthSpec {
    Levy { mu: f64, n_steps: usize, seed: u64 },
    Brownian { step_sigma: f64, n_steps: usize, seed: u64 },
    Shape { shape: ShapeSpec, seed: u64 },
    FgnBinary { h: f64, n: usize, seed: u64 },
}
