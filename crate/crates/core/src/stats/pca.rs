//! Correlation-matrix PCA with optional Varimax rotation.
//!
//! Loadings are eigenvectors scaled by the square root of their eigenvalue,
//! so each entry is the correlation between a variable and a component.
//! Scores are the standardized data mapped through `V_k Λ_k^{-1/2} T`,
//! which gives uncorrelated unit-variance components before and after an
//! orthogonal rotation `T`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::linalg::{jacobi_eigen, Matrix};
use super::matrix::MetricMatrix;
use super::selection::assign_dimensions;
use crate::error::{Error, Result};
use crate::scalar::{mean, sample_variance, Scalar};

pub const EIGEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rotation {
    None,
    Varimax {
        /// Rows scaled to unit communality while rotating.
        kaiser: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaOptions {
    pub k: usize,
    pub rotation: Rotation,
    /// Stop once a full sweep improves the Varimax criterion by less than this.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for PcaOptions {
    fn default() -> Self {
        Self { k: 3, rotation: Rotation::Varimax { kaiser: true }, tol: 1e-6, max_sweeps: 1000 }
    }
}

impl PcaOptions {
    pub fn with_k(k: usize) -> Self {
        Self { k, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel<T> {
    pub k: usize,
    /// Variables the model was fitted on, in column order.
    pub variables: Vec<String>,
    pub row_ids: Vec<String>,
    /// All eigenvalues of the correlation matrix, descending.
    pub eigenvalues: Vec<T>,
    /// Variables × k loadings before rotation.
    pub unrotated: Matrix<T>,
    /// Variables × k loadings after rotation (equal to `unrotated` without one).
    pub loadings: Matrix<T>,
    /// k × k orthogonal matrix with `loadings = unrotated · rotation`.
    pub rotation: Matrix<T>,
    /// Rows × k component scores.
    pub scores: Matrix<T>,
    /// Share of total variance carried by each component.
    pub explained: Vec<T>,
    pub retained: Vec<String>,
    /// Variable → 0-based component with the largest absolute loading.
    pub assignment: BTreeMap<String, usize>,
    pub sweeps: usize,
}

impl<T: Scalar> PcaModel<T> {
    pub fn total_explained(&self) -> T {
        self.explained.iter().copied().sum()
    }

    pub fn communalities(&self) -> Vec<T> {
        row_sum_squares(&self.loadings)
    }

    pub fn loading_row(&self, variable: &str) -> Option<&[T]> {
        self.variables.iter().position(|v| v == variable).map(|i| self.loadings.row(i))
    }
}

fn row_sum_squares<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&x| x * x).sum()).collect()
}

/// Column-standardizes with the sample standard deviation. Constant columns
/// become zeros.
pub(crate) fn standardize<T: Scalar>(columns: &[Vec<T>]) -> Vec<Vec<T>> {
    columns
        .iter()
        .map(|c| {
            let m = mean(c);
            let sd = sample_variance(c).sqrt();
            if sd > T::zero() {
                c.iter().map(|&v| (v - m) / sd).collect()
            } else {
                vec![T::zero(); c.len()]
            }
        })
        .collect()
}

fn correlation_of<T: Scalar>(z: &[Vec<T>]) -> Matrix<T> {
    let p = z.len();
    let n = z.first().map_or(0, Vec::len);
    let denom = T::of_usize(n.saturating_sub(1).max(1));
    let mut r = Matrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let v: T = z[i].iter().zip(&z[j]).map(|(&a, &b)| a * b).sum::<T>() / denom;
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    r
}

/// The Varimax criterion: summed per-column variance of squared loadings.
pub fn varimax_criterion<T: Scalar>(loadings: &Matrix<T>) -> T {
    let p = T::of_usize(loadings.rows());
    (0..loadings.cols())
        .map(|j| {
            let sq: Vec<T> = loadings.col(j).iter().map(|&x| x * x).collect();
            let s2: T = sq.iter().copied().sum();
            let s4: T = sq.iter().map(|&x| x * x).sum();
            s4 / p - (s2 / p) * (s2 / p)
        })
        .sum()
}

fn rotate_pair<T: Scalar>(m: &mut Matrix<T>, j: usize, l: usize, cos: T, sin: T) {
    for i in 0..m.rows() {
        let x = m[(i, j)];
        let y = m[(i, l)];
        m[(i, j)] = x * cos + y * sin;
        m[(i, l)] = -x * sin + y * cos;
    }
}

/// Kaiser's pairwise Varimax. Returns the rotated loadings, the rotation
/// matrix and the number of sweeps.
///
/// Converges when a sweep gains less than `tol` on the criterion; a few
/// extra sweeps then polish the angles to machine precision so the result
/// does not depend on where the threshold happened to be crossed.
pub fn varimax<T: Scalar>(
    loadings: &Matrix<T>,
    kaiser: bool,
    tol: f64,
    max_sweeps: usize,
) -> Result<(Matrix<T>, Matrix<T>, usize)> {
    let (p, k) = (loadings.rows(), loadings.cols());
    let mut rot = Matrix::identity(k);
    if k < 2 {
        return Ok((loadings.clone(), rot, 0));
    }
    let h: Vec<T> = row_sum_squares(loadings).into_iter().map(T::sqrt).collect();
    let mut a = loadings.clone();
    if kaiser {
        for i in 0..p {
            if h[i] > T::zero() {
                for j in 0..k {
                    a[(i, j)] = a[(i, j)] / h[i];
                }
            }
        }
    }
    let pn = T::of_usize(p);
    let tol = T::of(tol);
    let polish = T::epsilon().sqrt() * T::of(1e-2);
    let mut criterion = varimax_criterion(&a);
    let mut converged = false;
    let mut sweeps = 0;
    loop {
        if sweeps == max_sweeps {
            if converged {
                break;
            }
            return Err(Error::NonConvergence { sweeps });
        }
        sweeps += 1;
        let mut max_angle = T::zero();
        for j in 0..k {
            for l in j + 1..k {
                let (mut sa, mut sb, mut sc, mut sd) = (T::zero(), T::zero(), T::zero(), T::zero());
                for i in 0..p {
                    let (x, y) = (a[(i, j)], a[(i, l)]);
                    let u = x * x - y * y;
                    let v = (x * y) + (x * y);
                    sa = sa + u;
                    sb = sb + v;
                    sc = sc + (u * u - v * v);
                    sd = sd + (u * v) + (u * v);
                }
                let num = sd - (sa * sb + sa * sb) / pn;
                let den = sc - (sa * sa - sb * sb) / pn;
                let phi = num.atan2(den) * T::of(0.25);
                if phi == T::zero() {
                    continue;
                }
                max_angle = max_angle.max(phi.abs());
                let (s, c) = phi.sin_cos();
                rotate_pair(&mut a, j, l, c, s);
                rotate_pair(&mut rot, j, l, c, s);
            }
        }
        let next = varimax_criterion(&a);
        let gain = next - criterion;
        criterion = next;
        if gain < tol {
            converged = true;
        }
        if converged && max_angle <= polish {
            break;
        }
    }
    if kaiser {
        for i in 0..p {
            for j in 0..k {
                a[(i, j)] = a[(i, j)] * h[i];
            }
        }
    }
    Ok((a, rot, sweeps))
}

/// Fits a k-component PCA on the standardized columns of `x`.
pub fn pca_varimax<T: Scalar>(x: &MetricMatrix<T>, opts: &PcaOptions) -> Result<PcaModel<T>> {
    let (n, p, k) = (x.n_rows(), x.n_cols(), opts.k);
    if k == 0 || k > p {
        return Err(Error::InvalidArgument(format!("k = {k} components requested from {p} columns")));
    }
    if n < 3 {
        return Err(Error::InsufficientData(format!("PCA needs at least 3 rows, got {n}")));
    }
    if n <= p {
        log::warn!("PCA on {n} rows and {p} columns: fewer rows than recommended");
    }
    x.check_variance()?;
    let z = standardize(&(0..p).map(|j| x.values().col(j)).collect::<Vec<_>>());
    let r = correlation_of(&z);
    let eig = jacobi_eigen(&r, T::of(EIGEN_TOL))?;

    let mut unrotated = Matrix::zeros(p, k);
    let mut weights = Matrix::zeros(p, k);
    for j in 0..k {
        let lambda = eig.values[j].max(T::zero());
        let root = lambda.sqrt();
        let inv = if lambda > T::epsilon() * T::of_usize(p) { T::one() / root } else { T::zero() };
        for i in 0..p {
            unrotated[(i, j)] = eig.vectors[(i, j)] * root;
            weights[(i, j)] = eig.vectors[(i, j)] * inv;
        }
    }

    let (loadings, rotation, sweeps) = match opts.rotation {
        Rotation::None => (unrotated.clone(), Matrix::identity(k), 0),
        Rotation::Varimax { kaiser } => {
            let (l, t, s) = varimax(&unrotated, kaiser, opts.tol, opts.max_sweeps)?;
            canonical_order(l, t, s)
        }
    };

    let weights = weights.matmul(&rotation);
    let mut scores = Matrix::zeros(n, k);
    for i in 0..n {
        for j in 0..k {
            scores[(i, j)] = (0..p).map(|v| z[v][i] * weights[(v, j)]).sum();
        }
    }
    let pn = T::of_usize(p);
    let explained = (0..k).map(|j| loadings.col(j).iter().map(|&v| v * v).sum::<T>() / pn).collect();
    let mut model = PcaModel {
        k,
        variables: x.col_names().to_vec(),
        row_ids: x.row_ids().to_vec(),
        eigenvalues: eig.values,
        unrotated,
        loadings,
        rotation,
        scores,
        explained,
        retained: x.col_names().to_vec(),
        assignment: BTreeMap::new(),
        sweeps,
    };
    model.assignment = assign_dimensions(&model);
    Ok(model)
}

/// Orders rotated components by variance carried and orients each so its
/// loadings sum to a non-negative value.
fn canonical_order<T: Scalar>(
    loadings: Matrix<T>,
    rotation: Matrix<T>,
    sweeps: usize,
) -> (Matrix<T>, Matrix<T>, usize) {
    let k = loadings.cols();
    let ss: Vec<T> = (0..k).map(|j| loadings.col(j).iter().map(|&v| v * v).sum()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| ss[b].partial_cmp(&ss[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut l = loadings.select_cols(&order);
    let mut t = rotation.select_cols(&order);
    for j in 0..k {
        if l.col(j).iter().copied().sum::<T>() < T::zero() {
            for i in 0..l.rows() {
                l[(i, j)] = -l[(i, j)];
            }
            for i in 0..t.rows() {
                t[(i, j)] = -t[(i, j)];
            }
        }
    }
    (l, t, sweeps)
}

/// First principal component of a few standardized columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstComponent<T> {
    /// Unit-variance scores, one per row.
    pub scores: Vec<T>,
    /// Share of the standardized variance carried by the component.
    pub explained: T,
}

/// Scores on the first component of `columns` (each a full column), signed
/// so they correlate non-negatively with `columns[align]`. Constant columns
/// contribute nothing; if every column is constant all scores are zero.
pub fn first_component<T: Scalar>(columns: &[Vec<T>], align: usize) -> Result<FirstComponent<T>> {
    let n = columns.first().map_or(0, Vec::len);
    let z = standardize(columns);
    let r = correlation_of(&z);
    let eig = jacobi_eigen(&r, T::of(EIGEN_TOL))?;
    let lambda = eig.values[0];
    let trace: T = (0..r.rows()).map(|i| r[(i, i)]).sum();
    if !(lambda > T::epsilon() * T::of_usize(columns.len())) {
        return Ok(FirstComponent { scores: vec![T::zero(); n], explained: T::zero() });
    }
    let inv = T::one() / lambda.sqrt();
    let mut scores: Vec<T> =
        (0..n).map(|i| z.iter().enumerate().map(|(v, col)| col[i] * eig.vectors[(v, 0)]).sum::<T>() * inv).collect();
    let mut dir: T = scores.iter().zip(&z[align]).map(|(&s, &a)| s * a).sum();
    if dir == T::zero() {
        dir = (0..columns.len()).map(|v| eig.vectors[(v, 0)]).sum();
    }
    if dir < T::zero() {
        scores.iter_mut().for_each(|s| *s = -*s);
    }
    Ok(FirstComponent { scores, explained: lambda / trace })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    use super::*;
    use crate::stats::matrix::Labels;

    pub(crate) fn matrix_from_cols(names: &[&str], cols: &[Vec<f64>]) -> MetricMatrix<f64> {
        let n = cols[0].len();
        MetricMatrix::new(
            (0..n).map(|i| format!("r{i}")).collect(),
            names.iter().map(|s| s.to_string()).collect(),
            (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect(),
            vec![Labels::new(); n],
        )
        .unwrap()
    }

    fn two_blocks(n: usize, seed: u64) -> MetricMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cols = vec![Vec::new(); 4];
        for _ in 0..n {
            let f1: f64 = rng.sample(StandardNormal);
            let f2: f64 = rng.sample(StandardNormal);
            for (j, f) in [f1, f1, f2, f2].into_iter().enumerate() {
                let e: f64 = rng.sample(StandardNormal);
                cols[j].push(f + 0.2 * e);
            }
        }
        matrix_from_cols(&["a1", "a2", "b1", "b2"], &cols)
    }

    #[test]
    fn rotation_preserves_communalities() {
        let x = two_blocks(200, 3);
        let m = pca_varimax(&x, &PcaOptions::with_k(2)).unwrap();
        let before = row_sum_squares(&m.unrotated);
        for (a, b) in before.iter().zip(m.communalities()) {
            assert!((a - b).abs() < 1e-8);
        }
        let tt = m.rotation.transpose().matmul(&m.rotation);
        assert!(tt.max_abs_diff(&Matrix::identity(2)) < 1e-8);
        let unrot_total: f64 = m.eigenvalues[..2].iter().sum::<f64>() / 4.0;
        assert!((m.total_explained() - unrot_total).abs() < 1e-8);
        assert_eq!(m.assignment["a1"], m.assignment["a2"]);
        assert_eq!(m.assignment["b1"], m.assignment["b2"]);
        assert_ne!(m.assignment["a1"], m.assignment["b1"]);
    }

    #[test]
    fn scores_have_zero_mean_and_unit_variance() {
        let x = two_blocks(120, 9);
        let m = pca_varimax(&x, &PcaOptions::with_k(2)).unwrap();
        for j in 0..2 {
            let c = m.scores.col(j);
            assert!(mean(&c).abs() < 1e-9);
            assert!((sample_variance(&c) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn orthonormal_data_shares_variance_equally() {
        // Columns of a Hadamard-like design are exactly uncorrelated.
        let cols = vec![
            vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
            vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0],
            vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0],
        ];
        let m = pca_varimax(&matrix_from_cols(&["x", "y", "z"], &cols), &PcaOptions::with_k(3)).unwrap();
        for e in &m.explained {
            assert!((e - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn row_permutation_is_irrelevant() {
        let x = two_blocks(150, 5);
        let m1 = pca_varimax(&x, &PcaOptions::with_k(2)).unwrap();
        let perm: Vec<usize> = (0..150).rev().collect();
        let m2 = pca_varimax(&x.select_rows(&perm), &PcaOptions::with_k(2)).unwrap();
        assert!(m1.loadings.max_abs_diff(&m2.loadings) < 1e-9);
    }

    #[test]
    fn rejects_bad_k() {
        let x = two_blocks(50, 1);
        assert!(pca_varimax(&x, &PcaOptions::with_k(5)).is_err());
        assert!(pca_varimax(&x, &PcaOptions::with_k(0)).is_err());
    }

    #[test]
    fn first_component_degenerate_and_correlated() {
        let same = vec![vec![1.0; 4], vec![2.0; 4]];
        let fc = first_component(&same, 0).unwrap();
        assert!(fc.scores.iter().all(|&s| s == 0.0));

        let a = vec![1.0, 2.0, 4.0, 7.0];
        let b: Vec<f64> = a.iter().map(|v| 3.0 * v - 1.0).collect();
        let fc = first_component(&[a.clone(), b], 0).unwrap();
        let za = &standardize(&[a])[0];
        for (s, z) in fc.scores.iter().zip(za) {
            assert!((s - z).abs() < 1e-12);
        }
        assert!((fc.explained - 1.0).abs() < 1e-12);
    }
}
