//! Step-length model selection between a power law and an exponential, both
//! supported on `x >= xmin`.
//!
//! Power:       p(x) = (mu - 1) / xmin * (x / xmin)^(-mu)
//! Exponential: p(x) = lambda * exp(-lambda * (x - xmin))
//!
//! Each family has one free parameter, fitted by maximum likelihood, and the
//! two are compared by AIC.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::segmentation::{StepSeries, MIN_STEP_PX};

pub const MIN_STEPS_FOR_FIT: usize = 10;
/// AIC difference below which neither family is preferred.
pub const AIC_MARGIN: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepFamily {
    Power,
    Exponential,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepModelFit<T> {
    pub family: StepFamily,
    pub mu: T,
    /// Exponential rate, per pixel.
    pub lambda: T,
    pub xmin: T,
    pub loglik_power: T,
    pub loglik_exp: T,
    pub aic_power: T,
    pub aic_exp: T,
    pub n_steps: usize,
}

impl<T: Scalar> StepModelFit<T> {
    /// `aic_exp - aic_power`; positive favours the power law.
    pub fn delta_aic(&self) -> T {
        self.aic_exp - self.aic_power
    }
}

/// Fits both families to the step lengths of `series` with `xmin = 10 px`.
pub fn fit_mu_mle<T: Scalar>(series: &StepSeries<T>) -> Result<StepModelFit<T>> {
    fit_step_lengths(&series.lengths(), T::of(MIN_STEP_PX))
}

/// Fits both families to raw lengths, all of which must be at least `xmin`.
pub fn fit_step_lengths<T: Scalar>(lengths: &[T], xmin: T) -> Result<StepModelFit<T>> {
    let n = lengths.len();
    if n < MIN_STEPS_FOR_FIT {
        return Err(Error::InsufficientData(format!("insufficient steps: {n} (at least {MIN_STEPS_FOR_FIT} needed)")));
    }
    if !(xmin > T::zero()) {
        return Err(Error::InvalidArgument("xmin must be positive".into()));
    }
    if lengths.iter().any(|&x| !(x >= xmin) || !x.is_finite()) {
        return Err(Error::InvalidArgument("step lengths must be finite and at least xmin".into()));
    }
    let nf = T::of_usize(n);
    let sum_log: T = lengths.iter().map(|&x| (x / xmin).ln()).sum();
    let sum_excess: T = lengths.iter().map(|&x| x - xmin).sum();
    if !(sum_log > T::zero()) || !(sum_excess > T::zero()) {
        return Err(Error::Degenerate("every step equals xmin; the exponent is unbounded".into()));
    }

    let mu = T::one() + nf / sum_log;
    let loglik_power = nf * (mu - T::one()).ln() - nf * xmin.ln() - mu * sum_log;
    let lambda = nf / sum_excess;
    let loglik_exp = nf * lambda.ln() - lambda * sum_excess;

    let two = T::of(2.0);
    let aic_power = two - two * loglik_power;
    let aic_exp = two - two * loglik_exp;
    let family = if (aic_power - aic_exp).abs() < T::of(AIC_MARGIN) {
        StepFamily::Undecided
    } else if aic_power < aic_exp {
        StepFamily::Power
    } else {
        StepFamily::Exponential
    };
    Ok(StepModelFit { family, mu, lambda, xmin, loglik_power, loglik_exp, aic_power, aic_exp, n_steps: n })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn power_sample(mu: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| 10.0 * (1.0 - rng.random::<f64>()).powf(-1.0 / (mu - 1.0))).collect()
    }

    fn exp_sample(lambda: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| 10.0 - (1.0 - rng.random::<f64>()).ln() / lambda).collect()
    }

    #[test]
    fn recovers_power_exponent() {
        let fit = fit_step_lengths(&power_sample(2.0, 5000, 1), 10.0).unwrap();
        // Standard error (mu - 1) / sqrt(n) = 0.014.
        assert!((fit.mu - 2.0).abs() < 0.06, "{}", fit.mu);
        assert_eq!(fit.family, StepFamily::Power);
        assert!(fit.delta_aic() >= 2.0);
    }

    #[test]
    fn recognises_exponential_steps() {
        let fit = fit_step_lengths(&exp_sample(0.02, 1000, 2), 10.0).unwrap();
        assert_eq!(fit.family, StepFamily::Exponential);
        assert!(fit.delta_aic() <= -2.0);
        assert!((fit.lambda - 0.02).abs() < 0.003);
    }

    #[test]
    fn scale_equivariance() {
        let xs = power_sample(1.7, 400, 3);
        let scaled: Vec<f64> = xs.iter().map(|x| 3.0 * x).collect();
        let a = fit_step_lengths(&xs, 10.0).unwrap();
        let b = fit_step_lengths(&scaled, 30.0).unwrap();
        assert!((a.mu - b.mu).abs() < 1e-12);
    }

    #[test]
    fn aic_choice_flips_with_generating_family() {
        let mut agree = 0;
        for seed in 0..40 {
            let p = fit_step_lengths(&power_sample(2.0, 1000, seed), 10.0).unwrap();
            let e = fit_step_lengths(&exp_sample(0.02, 1000, 1000 + seed), 10.0).unwrap();
            agree += (p.family == StepFamily::Power && e.family == StepFamily::Exponential) as usize;
        }
        assert!(agree >= 38, "{agree}/40");
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_step_lengths(&[20.0; 9], 10.0), Err(Error::InsufficientData(_))));
        assert!(matches!(fit_step_lengths(&[10.0; 20], 10.0), Err(Error::Degenerate(_))));
        assert!(fit_step_lengths(&[5.0; 20], 10.0).is_err());
        let empty: StepSeries<f64> = StepSeries::default();
        assert!(fit_mu_mle(&empty).unwrap_err().to_string().contains("insufficient steps"));
    }

    #[test]
    fn works_in_f32() {
        let xs: Vec<f32> = power_sample(2.0, 2000, 4).into_iter().map(|x| x as f32).collect();
        let fit = fit_step_lengths(&xs, 10.0f32).unwrap();
        assert!((fit.mu - 2.0).abs() < 0.1);
    }
}
