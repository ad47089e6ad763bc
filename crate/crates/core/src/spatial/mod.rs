//! Spatial metrics: step-length model (μ MLE), drawing distance, the
//! turning-angle survival metric and minimum-convex-polygon coverage.

mod hull;
mod levy;

use crate::error::{Error, Result};
use crate::ink::DrawingSession;
use crate::scalar::Scalar;
use crate::segmentation::TurningAngles;
use crate::stats::linalg::{least_squares, Matrix};
use crate::stats::pca::first_component;

pub use hull::{convex_hull, polygon_area};
pub use levy::{fit_mu_mle, fit_step_lengths, StepFamily, StepModelFit, AIC_MARGIN, MIN_STEPS_FOR_FIT};

/// Sum of distances between consecutive raw points within each stroke;
/// pen-up travel is not ink and is excluded.
pub fn drawing_distance(session: &DrawingSession) -> f64 {
    session.strokes().iter().map(|s| s.length_px()).sum()
}

/// Hull area of every raw point as a percentage of the screen area.
pub fn convex_hull_coverage(session: &DrawingSession) -> f64 {
    let pts: Vec<[f64; 2]> = session.points().map(|p| [p.x_px, p.y_px]).collect();
    let area = polygon_area(&convex_hull(&pts));
    let screen = f64::from(session.screen_w()) * f64::from(session.screen_h());
    (area / screen * 100.0).clamp(0.0, 100.0)
}

/// Coefficients of `S(x) ≈ -a·x³ + b·x² - c·x + d`, `x = θ / 180`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleFit<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub rss: T,
}

pub const MIN_DISTINCT_ANGLES: usize = 4;

/// Survival `S(θ)` = fraction of angles `>= θ` on the grid `θ = 0..=180`.
pub fn angle_survival<T: Scalar>(angles: &[T]) -> Vec<T> {
    let mut sorted = angles.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = T::of_usize(sorted.len());
    (0..=180)
        .map(|theta| {
            let t = T::of(f64::from(theta));
            let below = sorted.partition_point(|&a| a < t);
            T::of_usize(sorted.len() - below) / n
        })
        .collect()
}

/// Least-squares fit of the cubic survival template to the angles'
/// survival curve.
pub fn angle_metric_fit<T: Scalar>(angles: &TurningAngles<T>) -> Result<AngleFit<T>> {
    let mut distinct = angles.angles_deg.clone();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    distinct.dedup();
    if distinct.len() < MIN_DISTINCT_ANGLES {
        return Err(Error::InsufficientData(format!(
            "insufficient angles: {} distinct (at least {MIN_DISTINCT_ANGLES} needed)",
            distinct.len()
        )));
    }
    fit_survival_curve(&angle_survival(&angles.angles_deg))
}

/// Fits the template to survival values on the 181-point integer grid.
pub fn fit_survival_curve<T: Scalar>(survival: &[T]) -> Result<AngleFit<T>> {
    if survival.len() != 181 {
        return Err(Error::InvalidArgument("survival curve must have 181 grid values".into()));
    }
    let rows: Vec<Vec<T>> = (0..=180)
        .map(|theta| {
            let x = T::of(f64::from(theta) / 180.0);
            vec![-(x * x * x), x * x, -x, T::one()]
        })
        .collect();
    let (beta, rss) = least_squares(&Matrix::from_rows(&rows), survival)?;
    Ok(AngleFit { a: beta[0], b: beta[1], c: beta[2], d: beta[3], rss })
}

/// Dataset-level angle metric scores plus the first component's share of
/// variance.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleScores<T> {
    pub scores: Vec<T>,
    pub explained: T,
}

/// First-component scores of the standardized `(a, b, c)` coefficients,
/// signed to correlate positively with `c`.
pub fn angle_metric_scores<T: Scalar>(fits: &[AngleFit<T>]) -> Result<AngleScores<T>> {
    if fits.len() < 3 {
        return Err(Error::InsufficientData(format!("angle metric needs at least 3 drawings, got {}", fits.len())));
    }
    let cols = vec![
        fits.iter().map(|f| f.a).collect(),
        fits.iter().map(|f| f.b).collect(),
        fits.iter().map(|f| f.c).collect(),
    ];
    let fc = first_component(&cols, 2)?;
    Ok(AngleScores { scores: fc.scores, explained: fc.explained })
}
