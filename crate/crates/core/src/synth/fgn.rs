//! Fractional Gaussian noise by circulant embedding (Davies–Harte).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::temporal::BinarySeries;

/// Autocovariance of unit-variance fGn at lag `k`.
pub fn fgn_autocovariance(h: f64, k: usize) -> f64 {
    let k = k as f64;
    let e = 2.0 * h;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// `n` samples of unit-variance fGn with Hurst exponent `h`.
pub fn gen_fgn(h: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fgn_with(h, n, &mut rng)
}

pub(crate) fn fgn_with(h: f64, n: usize, rng: &mut impl rand::Rng) -> Result<Vec<f64>> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidArgument(format!("Hurst exponent must lie in (0, 1), got {h}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("fGn needs at least 2 samples".into()));
    }
    let m = 2 * n;
    // First row of the circulant: γ(0..=n), then γ(n-1..=1).
    let mut row: Vec<Complex64> =
        (0..=n).chain((1..n).rev()).map(|k| Complex64::new(fgn_autocovariance(h, k), 0.0)).collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    fft.process(&mut row);
    let scale = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    if row.iter().any(|c| c.re < -1e-10 * scale) {
        return Err(Error::Degenerate(format!(
            "circulant embedding is not nonnegative-definite for n = {n}; use a larger n"
        )));
    }
    let mut w: Vec<Complex64> = row
        .iter()
        .map(|lam| {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            (lam.re.max(0.0) / m as f64).sqrt() * Complex64::new(a, b)
        })
        .collect();
    fft.process(&mut w);
    Ok(w.iter().take(n).map(|c| c.re).collect())
}

/// Bits of fGn thresholded at its sample median (`1` above).
pub fn gen_fgn_binary(h: f64, n: usize, seed: u64) -> Result<BinarySeries> {
    if n < 512 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("n must be a power of two >= 512, got {n}")));
    }
    let x = gen_fgn(h, n, seed)?;
    threshold_bits(&x, 0.5)
}

/// Sets the top `share_ones` fraction of `x` (by value) to 1, dt = 100 ms.
pub(crate) fn threshold_bits(x: &[f64], share_ones: f64) -> Result<BinarySeries> {
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n_ones = ((share_ones * x.len() as f64).round() as usize).clamp(1, x.len());
    let cut_idx = x.len() - n_ones;
    let cut = if cut_idx == 0 { f64::NEG_INFINITY } else { (sorted[cut_idx - 1] + sorted[cut_idx]) / 2.0 };
    BinarySeries::new(100, x.iter().map(|&v| u8::from(v > cut)).collect())
}
