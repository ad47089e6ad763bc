//! Hurst exponent estimators on binary series (DFA-1 and rescaled range)
//! and their dataset-level combination.

use serde::Serialize;

use super::BinarySeries;
use crate::error::{Error, Result};
use crate::scalar::ols_line;
use crate::stats::pca::first_component;

/// Shorter series give unreliable scaling fits.
pub const MIN_HURST_BITS: usize = 256;
const MIN_BOX: usize = 8;
const N_SIZES: usize = 16;
const MIN_SIZES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HurstEstimate {
    pub h_dfa: f64,
    pub h_rs: f64,
}

/// Log-spaced integer box sizes from 8 to `n / 4`.
pub fn box_sizes(n: usize) -> Vec<usize> {
    let max = n / 4;
    if max < MIN_BOX {
        return Vec::new();
    }
    let ratio = max as f64 / MIN_BOX as f64;
    let mut sizes: Vec<usize> =
        (0..N_SIZES).map(|i| (MIN_BOX as f64 * ratio.powf(i as f64 / (N_SIZES - 1) as f64)).round() as usize).collect();
    sizes.dedup();
    sizes
}

/// Root-mean-square residual of a linear fit within every non-overlapping
/// box, boxes laid from both ends so no sample is ignored.
fn dfa_fluctuation(profile: &[f64], s: usize) -> f64 {
    let n = profile.len();
    let n_boxes = n / s;
    // x = 0..s-1 centred, so the OLS slope is Σ x·y / Σ x².
    let xc: Vec<f64> = (0..s).map(|i| i as f64 - (s as f64 - 1.0) / 2.0).collect();
    let sxx: f64 = xc.iter().map(|x| x * x).sum();
    let mut total = 0.0;
    for b in 0..n_boxes {
        for start in [b * s, n - (b + 1) * s] {
            let seg = &profile[start..start + s];
            let my = seg.iter().sum::<f64>() / s as f64;
            let slope = seg.iter().zip(&xc).map(|(y, x)| x * (y - my)).sum::<f64>() / sxx;
            total += seg.iter().zip(&xc).map(|(y, x)| (y - my - slope * x).powi(2)).sum::<f64>();
        }
    }
    (total / (2 * n_boxes * s) as f64).sqrt()
}

/// Mean rescaled range over non-overlapping boxes of size `s`.
fn rescaled_range(x: &[f64], s: usize) -> Option<f64> {
    let mut acc = 0.0;
    let mut used = 0usize;
    for seg in x.chunks_exact(s) {
        let m = seg.iter().sum::<f64>() / s as f64;
        let sd = (seg.iter().map(|v| (v - m).powi(2)).sum::<f64>() / s as f64).sqrt();
        if sd == 0.0 {
            continue;
        }
        let (mut cum, mut lo, mut hi) = (0.0f64, 0.0f64, 0.0f64);
        for v in seg {
            cum += v - m;
            lo = lo.min(cum);
            hi = hi.max(cum);
        }
        acc += (hi - lo) / sd;
        used += 1;
    }
    (used > 0).then(|| acc / used as f64)
}

/// DFA-1 and R/S Hurst estimates, each clamped to `[0, 2]`.
pub fn hurst_estimators(series: &BinarySeries) -> Result<HurstEstimate> {
    let n = series.len();
    if n < MIN_HURST_BITS {
        return Err(Error::InsufficientData(format!("Hurst estimation needs at least {MIN_HURST_BITS} bits, got {n}")));
    }
    let ones = series.ones();
    if ones == 0 || ones == n {
        return Err(Error::ZeroVariance("binary series is constant".into()));
    }
    let sizes = box_sizes(n);
    if sizes.len() < MIN_SIZES {
        return Err(Error::InsufficientData(format!("only {} distinct box sizes", sizes.len())));
    }
    let x = series.as_f64();
    let mean = series.mean();
    let mut profile = Vec::with_capacity(n);
    let mut cum = 0.0;
    for v in &x {
        cum += v - mean;
        profile.push(cum);
    }

    let log_s: Vec<f64> = sizes.iter().map(|&s| (s as f64).ln()).collect();
    let log_f: Vec<f64> = sizes.iter().map(|&s| dfa_fluctuation(&profile, s).ln()).collect();
    let (h_dfa, _) = ols_line(&log_s, &log_f);

    let (mut ls, mut lr) = (Vec::new(), Vec::new());
    for (&s, &l) in sizes.iter().zip(&log_s) {
        if let Some(rs) = rescaled_range(&x, s) {
            ls.push(l);
            lr.push(rs.ln());
        }
    }
    if ls.len() < 2 {
        return Err(Error::Degenerate("every R/S box is constant".into()));
    }
    let (h_rs, _) = ols_line(&ls, &lr);
    if !h_dfa.is_finite() || !h_rs.is_finite() {
        return Err(Error::Degenerate("Hurst scaling fit is not finite".into()));
    }
    Ok(HurstEstimate { h_dfa: h_dfa.clamp(0.0, 2.0), h_rs: h_rs.clamp(0.0, 2.0) })
}

/// Dataset-level Hurst index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HurstIndex {
    pub scores: Vec<f64>,
    /// First-component variance share; `None` under the mean fallback.
    pub explained: Option<f64>,
    /// True when fewer than three drawings forced the per-drawing mean.
    pub fallback: bool,
}

/// First-component scores of standardized `(h_dfa, h_rs)`, aligned with
/// `h_dfa`; with fewer than 3 drawings, the mean of the two estimators.
pub fn hurst_index(per_drawing: &[HurstEstimate]) -> Result<HurstIndex> {
    if per_drawing.len() < 3 {
        log::warn!("hurst_index: {} drawings; using the mean of the two estimators", per_drawing.len());
        return Ok(HurstIndex {
            scores: per_drawing.iter().map(|h| (h.h_dfa + h.h_rs) / 2.0).collect(),
            explained: None,
            fallback: true,
        });
    }
    let cols = vec![per_drawing.iter().map(|h| h.h_dfa).collect(), per_drawing.iter().map(|h| h.h_rs).collect()];
    let fc = first_component(&cols, 0)?;
    Ok(HurstIndex { scores: fc.scores, explained: Some(fc.explained), fallback: false })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn coin(n: usize, seed: u64) -> BinarySeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BinarySeries::new(100, (0..n).map(|_| rng.random_range(0..=1u8)).collect()).unwrap()
    }

    #[test]
    fn box_size_grid() {
        let s = box_sizes(4096);
        assert_eq!((s[0], *s.last().unwrap()), (8, 1024));
        assert!(s.len() >= 10 && s.windows(2).all(|w| w[0] < w[1]));
        assert!(box_sizes(256).len() >= 10);
    }

    #[test]
    fn white_noise_is_near_half() {
        let mut hs: Vec<f64> = (0..20).map(|s| hurst_estimators(&coin(4096, s)).unwrap().h_dfa).collect();
        hs.sort_by(f64::total_cmp);
        let median = (hs[9] + hs[10]) / 2.0;
        assert!((median - 0.5).abs() < 0.05, "{median}");
    }

    #[test]
    fn alternation_is_anti_persistent() {
        let bits: Vec<u8> = (0..1024).map(|i| (i % 2) as u8).collect();
        let h = hurst_estimators(&BinarySeries::new(100, bits).unwrap()).unwrap();
        assert!(h.h_dfa < 0.5, "{h:?}");
    }

    #[test]
    fn bit_flip_invariance() {
        let s = coin(2048, 4);
        let flipped = BinarySeries::new(100, s.bits().iter().map(|b| 1 - b).collect()).unwrap();
        let (a, b) = (hurst_estimators(&s).unwrap(), hurst_estimators(&flipped).unwrap());
        assert!((a.h_dfa - b.h_dfa).abs() < 1e-9);
        assert!((a.h_rs - b.h_rs).abs() < 1e-9);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(hurst_estimators(&coin(255, 1)), Err(Error::InsufficientData(_))));
        let flat = BinarySeries::new(100, vec![1; 512]).unwrap();
        assert!(matches!(hurst_estimators(&flat), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn index_cases() {
        let same = vec![HurstEstimate { h_dfa: 0.6, h_rs: 0.7 }; 4];
        assert_eq!(hurst_index(&same).unwrap().scores, vec![0.0; 4]);

        let corr: Vec<HurstEstimate> =
            (0..5).map(|i| HurstEstimate { h_dfa: 0.5 + 0.1 * i as f64, h_rs: 0.2 * i as f64 }).collect();
        let idx = hurst_index(&corr).unwrap();
        // Proportional to the standardized h_dfa column.
        let ratio = idx.scores[4] / (0.5 + 0.4 - 0.7);
        for (s, h) in idx.scores.iter().zip(&corr) {
            assert!((s - ratio * (h.h_dfa - 0.7)).abs() < 1e-9);
        }
        assert!(idx.scores[4] > 0.0);

        let two = hurst_index(&corr[..2]).unwrap();
        assert!(two.fallback);
        assert_eq!(two.scores, vec![0.25, 0.4]);
    }
}
