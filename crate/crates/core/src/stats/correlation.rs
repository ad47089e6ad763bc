use super::linalg::Matrix;
use super::matrix::MetricMatrix;
use super::special::student_t_two_sided;
use crate::error::{Error, Result};
use crate::scalar::{mean, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix<T> {
    pub names: Vec<String>,
    pub r: Matrix<T>,
    /// Two-sided p-values of the t test on each coefficient.
    pub p: Matrix<T>,
}

/// Pearson r for two equally long samples.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> T {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        sxy = sxy + (a - mx) * (b - my);
        sxx = sxx + (a - mx) * (a - mx);
        syy = syy + (b - my) * (b - my);
    }
    (sxy / (sxx * syy).sqrt()).max(-T::one()).min(T::one())
}

/// p-value of r under H0: rho = 0, via t = r sqrt((n-2)/(1-r^2)).
pub fn pearson_p<T: Scalar>(r: T, n: usize) -> T {
    if r.abs() >= T::one() {
        return T::zero();
    }
    let df = T::of_usize(n - 2);
    let t = r * (df / (T::one() - r * r)).sqrt();
    student_t_two_sided(t, df)
}

pub fn pearson_matrix<T: Scalar>(x: &MetricMatrix<T>) -> Result<CorrelationMatrix<T>> {
    let n = x.n_rows();
    if n < 3 {
        return Err(Error::InsufficientData(format!("correlation needs at least 3 rows, got {n}")));
    }
    x.check_variance()?;
    let k = x.n_cols();
    let cols: Vec<Vec<T>> = (0..k).map(|j| x.values().col(j)).collect();
    let mut r = Matrix::identity(k);
    let mut p = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let rij = pearson(&cols[i], &cols[j]);
            let pij = pearson_p(rij, n);
            r[(i, j)] = rij;
            r[(j, i)] = rij;
            p[(i, j)] = pij;
            p[(j, i)] = pij;
        }
    }
    Ok(CorrelationMatrix { names: x.col_names().to_vec(), r, p })
}

/// Replaces every column except `covariate` by its OLS residuals on the
/// covariate; the covariate itself is dropped.
pub fn residualize<T: Scalar>(x: &MetricMatrix<T>, covariate: &str) -> Result<MetricMatrix<T>> {
    let n = x.n_rows();
    if n < 3 {
        return Err(Error::InsufficientData(format!("residualization needs at least 3 rows, got {n}")));
    }
    let c = x.column(covariate).ok_or_else(|| Error::InvalidArgument(format!("unknown covariate '{covariate}'")))?;
    let mc = mean(&c);
    let scc: T = c.iter().map(|&v| (v - mc) * (v - mc)).sum();
    if !(scc > T::zero()) {
        return Err(Error::ZeroVariance(format!("covariate '{covariate}'")));
    }
    let keep: Vec<(usize, String)> = x
        .col_names()
        .iter()
        .enumerate()
        .filter(|(_, name)| name.as_str() != covariate)
        .map(|(j, name)| (j, name.clone()))
        .collect();
    let mut out = Matrix::zeros(n, keep.len());
    for (jj, (j, _)) in keep.iter().enumerate() {
        let y = x.values().col(*j);
        let my = mean(&y);
        let scy: T = c.iter().zip(&y).map(|(&a, &b)| (a - mc) * (b - my)).sum();
        let slope = scy / scc;
        for i in 0..n {
            out[(i, jj)] = (y[i] - my) - slope * (c[i] - mc);
        }
    }
    Ok(x.with_values(keep.into_iter().map(|(_, n)| n).collect(), out))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::stats::matrix::Labels;

    fn matrix(cols: &[(&str, Vec<f64>)]) -> MetricMatrix<f64> {
        let n = cols[0].1.len();
        let rows = (0..n).map(|i| cols.iter().map(|(_, c)| c[i]).collect()).collect();
        MetricMatrix::new(
            (0..n).map(|i| i.to_string()).collect(),
            cols.iter().map(|(n, _)| n.to_string()).collect(),
            rows,
            vec![Labels::new(); n],
        )
        .unwrap()
    }

    #[test]
    fn hand_computed_r() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y = vec![1.0, 3.0, 2.0, 4.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let cm = pearson_matrix(&matrix(&[("x", x), ("y", y), ("neg", neg)])).unwrap();
        // cov = 4/3, var = 5/3 for both columns.
        assert!((cm.r[(0, 1)] - 0.8).abs() < 1e-12);
        // t = 0.8 * sqrt(2 / 0.36) with 2 dof; p = 1 - t / sqrt(2 + t^2).
        let t: f64 = 0.8 * (2.0f64 / 0.36).sqrt();
        let expect = 1.0 - t / (2.0 + t * t).sqrt();
        assert!((cm.p[(0, 1)] - expect).abs() < 1e-12);
        assert_eq!(cm.r[(0, 2)], -1.0);
        assert_eq!(cm.p[(0, 2)], 0.0);
        for i in 0..3 {
            assert_eq!(cm.r[(i, i)], 1.0);
            assert_eq!(cm.p[(i, i)], 0.0);
        }
        assert_eq!(cm.r, cm.r.transpose());
    }

    #[test]
    fn zero_variance_rejected() {
        let x = matrix(&[("x", vec![1.0, 2.0, 3.0]), ("c", vec![1.0; 3])]);
        assert!(matches!(pearson_matrix(&x), Err(Error::ZeroVariance(_))));
        assert!(matches!(residualize(&x, "c"), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn residual_cases() {
        let cov = vec![1.0, 2.0, 3.0, 4.0];
        let lin: Vec<f64> = cov.iter().map(|v| 2.0 * v + 5.0).collect();
        let unc = vec![1.0, -1.0, -1.0, 1.0];
        let r = residualize(&matrix(&[("lin", lin), ("cov", cov), ("unc", unc.clone())]), "cov").unwrap();
        assert_eq!(r.col_names(), &["lin".to_string(), "unc".to_string()]);
        assert!(r.column("lin").unwrap().iter().all(|v| v.abs() < 1e-12));
        assert_eq!(r.column("unc").unwrap(), unc);
    }

    proptest! {
        #[test]
        fn residuals_orthogonal_to_covariate(
            data in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 5..40)
        ) {
            let c: Vec<f64> = data.iter().map(|d| d.0).collect();
            let y: Vec<f64> = data.iter().map(|d| d.1).collect();
            prop_assume!(crate::scalar::sample_variance(&c) > 1e-6);
            let r = residualize(&matrix(&[("y", y), ("c", c.clone())]), "c").unwrap();
            let res = r.column("y").unwrap();
            let mc = mean(&c);
            let dot: f64 = res.iter().zip(&c).map(|(a, b)| a * (b - mc)).sum();
            prop_assert!(dot.abs() < 1e-9);
            prop_assert!(res.iter().sum::<f64>().abs() < 1e-9);
        }
    }
}
