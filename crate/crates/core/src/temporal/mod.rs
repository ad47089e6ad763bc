//! Temporal metrics: drawing-time summary, Gini of the binary drawing
//! series, entropy of cumulative drawing time, and Hurst estimators.

mod hurst;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ink::{sequence_segments, DrawingSession, SegmentKind};
use crate::spatial::drawing_distance;

pub use hurst::{box_sizes, hurst_estimators, hurst_index, HurstEstimate, HurstIndex, MIN_HURST_BITS};

/// Fixed-rate drawing (1) / not drawing (0) samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySeries {
    dt_ms: i64,
    bits: Vec<u8>,
}

impl BinarySeries {
    pub fn new(dt_ms: i64, bits: Vec<u8>) -> Result<Self> {
        if dt_ms <= 0 {
            return Err(Error::InvalidArgument(format!("dt_ms must be positive, got {dt_ms}")));
        }
        if bits.is_empty() {
            return Err(Error::InsufficientData("binary series is empty".into()));
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!("binary series holds non-bit value {b}")));
        }
        Ok(Self { dt_ms, bits })
    }

    pub fn dt_ms(&self) -> i64 {
        self.dt_ms
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Proportion of 1-bits.
    pub fn mean(&self) -> f64 {
        self.ones() as f64 / self.len() as f64
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| f64::from(b)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemporalSummary {
    pub test_time_ms: i64,
    pub drawing_time_ms: i64,
    pub n_sequences: usize,
    pub speed_px_per_ms: f64,
    pub drawing_time_proportion: f64,
}

/// Test time, ink time, sequence count, speed and ink-time proportion.
///
/// Test time is the session span, raised to the drawing time in the corner
/// case where tap floors push ink time past the span (e.g. a trailing tap).
pub fn temporal_summary(session: &DrawingSession) -> TemporalSummary {
    let segments = sequence_segments(session);
    let drawing_time_ms: i64 = segments.iter().filter(|s| s.kind == SegmentKind::Drawing).map(|s| s.duration_ms).sum();
    let test_time_ms = session.span_ms().max(drawing_time_ms);
    TemporalSummary {
        test_time_ms,
        drawing_time_ms,
        n_sequences: segments.len(),
        speed_px_per_ms: drawing_distance(session) / drawing_time_ms as f64,
        drawing_time_proportion: drawing_time_ms as f64 / test_time_ms as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GiniVariant {
    /// `Σ|xi - xj| / (2 n² x̄)`; equals `1 - p` on bits.
    #[default]
    Population,
    /// The population value scaled by `n / (n - 1)`.
    Unbiased,
}

/// Gini coefficient of arbitrary non-negative values (sorted formula).
pub fn gini(values: &[f64], variant: GiniVariant) -> Result<f64> {
    let n = values.len();
    let total: f64 = values.iter().sum();
    if n == 0 || !(total > 0.0) {
        return Err(Error::Degenerate("Gini is undefined for a zero mean".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    // Σ_i Σ_j |xi - xj| = 2 Σ_i (2i - n + 1) x_(i) with 0-based ranks.
    let weighted: f64 = sorted.iter().enumerate().map(|(i, &x)| (2.0 * i as f64 - nf + 1.0) * x).sum();
    let g = weighted / (nf * total);
    Ok(scale_gini(g, n, variant))
}

fn scale_gini(g: f64, n: usize, variant: GiniVariant) -> f64 {
    match variant {
        GiniVariant::Population => g,
        GiniVariant::Unbiased if n > 1 => g * n as f64 / (n as f64 - 1.0),
        GiniVariant::Unbiased => g,
    }
}

/// Gini of the 0/1 series, computed in closed form as the share of 0-bits.
pub fn gini_binary(series: &BinarySeries, variant: GiniVariant) -> Result<f64> {
    let ones = series.ones();
    if ones == 0 {
        return Err(Error::Degenerate("Gini is undefined for an all-zero series (mean zero)".into()));
    }
    let n = series.len();
    Ok(scale_gini((n - ones) as f64 / n as f64, n, variant))
}

/// Cumulative ink time (ms) at each whole second `1..=floor(span / 1000)`
/// after the session starts. Taps count for their 1 ms floor.
pub fn cumulative_drawing_ms(session: &DrawingSession) -> Vec<i64> {
    let start = session.first_ms();
    let seconds = session.span_ms() / 1000;
    let intervals: Vec<(i64, i64)> =
        session.strokes().iter().map(|s| (s.first_ms(), s.first_ms() + s.drawing_ms())).collect();
    (1..=seconds)
        .map(|sec| {
            let t = start + 1000 * sec;
            intervals.iter().map(|&(a, b)| (b.min(t) - a).max(0)).sum()
        })
        .collect()
}

/// Shannon entropy (bits) of the distinct cumulative-drawing-time values
/// sampled once per second.
pub fn entropy_cumsum(session: &DrawingSession) -> Result<f64> {
    let samples = cumulative_drawing_ms(session);
    if samples.is_empty() {
        return Err(Error::InsufficientData(format!(
            "entropy needs a span of at least 1 s, got {} ms",
            session.span_ms()
        )));
    }
    Ok(shannon_entropy(&samples))
}

/// Entropy in bits of the empirical distribution of `symbols`.
pub fn shannon_entropy<K: Ord + Copy>(symbols: &[K]) -> f64 {
    let mut counts: BTreeMap<K, usize> = BTreeMap::new();
    for &s in symbols {
        *counts.entry(s).or_default() += 1;
    }
    let n = symbols.len() as f64;
    let h: f64 = counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}
