//! Small dense linear algebra: enough for correlation matrices of a dozen
//! variables and a few hundred rows.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.iter().flatten().copied().collect() }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Keeps the listed columns, in order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out[(i, jj)] = self[(i, j)];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix<T>) -> T {
        self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues descending, eigenvectors
/// as columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
    pub sweeps: usize,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition.
///
/// Iterates until the off-diagonal Frobenius norm falls below `tol` times
/// the full norm (floored at a few ulps for `f32`). Each eigenvector is
/// oriented so its largest-magnitude entry is positive.
pub fn jacobi_eigen<T: Scalar>(a: &Matrix<T>, tol: T) -> Result<SymmetricEigen<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "jacobi_eigen needs a square matrix");
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let tol = tol.max(T::epsilon() * T::of(8.0));
    let total: T = m.as_slice().iter().map(|&x| x * x).sum::<T>().sqrt();
    let mut sweeps = 0;
    loop {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + m[(p, q)] * m[(p, q)];
            }
        }
        let off = (off + off).sqrt();
        if off <= tol * total || total == T::zero() {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Degenerate(format!(
                "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    let nkp = c * akp - s * akq;
                    let nkq = s * akp + c * akq;
                    m[(k, p)] = nkp;
                    m[(p, k)] = nkp;
                    m[(k, q)] = nkq;
                    m[(q, k)] = nkq;
                }
                m[(p, p)] = m[(p, p)] - t * apq;
                m[(q, q)] = m[(q, q)] + t * apq;
                m[(p, q)] = T::zero();
                m[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = v.select_cols(&order);
    for j in 0..n {
        let mut pivot = 0;
        for i in 1..n {
            if vectors[(i, j)].abs() > vectors[(pivot, j)].abs() {
                pivot = i;
            }
        }
        if vectors[(pivot, j)] < T::zero() {
            for i in 0..n {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
    Ok(SymmetricEigen { values, vectors, sweeps })
}

/// Least-squares solution of `design · beta ≈ y` by Householder QR.
/// Returns the coefficients and the residual sum of squares.
pub fn least_squares<T: Scalar>(design: &Matrix<T>, y: &[T]) -> Result<(Vec<T>, T)> {
    let (m, n) = (design.rows(), design.cols());
    if m < n || y.len() != m {
        return Err(Error::InvalidArgument(format!(
            "least squares needs at least as many rows ({m}) as columns ({n})"
        )));
    }
    let mut a = design.clone();
    let mut b = y.to_vec();
    let scale = a.as_slice().iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    for j in 0..n {
        let norm = (j..m).map(|i| a[(i, j)] * a[(i, j)]).sum::<T>().sqrt();
        if norm <= scale * T::epsilon() * T::of_usize(m) {
            return Err(Error::Degenerate("rank-deficient design matrix".into()));
        }
        let alpha = if a[(j, j)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (j..m).map(|i| a[(i, j)]).collect();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        for col in j..n {
            let dot: T = (j..m).map(|i| v[i - j] * a[(i, col)]).sum();
            let f = (dot + dot) / vnorm2;
            for i in j..m {
                a[(i, col)] = a[(i, col)] - f * v[i - j];
            }
        }
        let dot: T = (j..m).map(|i| v[i - j] * b[i]).sum();
        let f = (dot + dot) / vnorm2;
        for i in j..m {
            b[i] = b[i] - f * v[i - j];
        }
    }
    let mut beta = vec![T::zero(); n];
    for j in (0..n).rev() {
        let mut s = b[j];
        for k in j + 1..n {
            s = s - a[(j, k)] * beta[k];
        }
        beta[j] = s / a[(j, j)];
    }
    let rss = b[n..].iter().map(|&r| r * r).sum();
    Ok((beta, rss))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_matches_nalgebra() {
        let rows = vec![
            vec![4.0, 1.0, -2.0, 2.0],
            vec![1.0, 2.0, 0.0, 1.0],
            vec![-2.0, 0.0, 3.0, -2.0],
            vec![2.0, 1.0, -2.0, -1.0],
        ];
        let a = Matrix::from_rows(&rows);
        let e = jacobi_eigen(&a, 1e-12).unwrap();
        let na = nalgebra::DMatrix::from_fn(4, 4, |i, j| rows[i][j]);
        let mut nv: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
        nv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (x, y) in e.values.iter().zip(&nv) {
            assert!((x - y).abs() < 1e-10);
        }
        // A v = lambda v
        for j in 0..4 {
            for i in 0..4 {
                let av: f64 = (0..4).map(|k| a[(i, k)] * e.vectors[(k, j)]).sum();
                assert!((av - e.values[j] * e.vectors[(i, j)]).abs() < 1e-10);
            }
        }
        let vtv = e.vectors.transpose().matmul(&e.vectors);
        assert!(vtv.max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }

    #[test]
    fn jacobi_in_f32() {
        let a = Matrix::from_rows(&[vec![2.0f32, 1.0], vec![1.0, 2.0]]);
        let e = jacobi_eigen(&a, 1e-12).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-5);
        assert!((e.values[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn least_squares_exact_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let design = Matrix::from_rows(&x.iter().map(|&v| vec![1.0, v]).collect::<Vec<_>>());
        let y: Vec<f64> = x.iter().map(|&v| 3.0 - 0.5 * v).collect();
        let (beta, rss) = least_squares(&design, &y).unwrap();
        assert!((beta[0] - 3.0).abs() < 1e-12 && (beta[1] + 0.5).abs() < 1e-12);
        assert!(rss < 1e-20);
    }

    #[test]
    fn least_squares_rank_deficient() {
        let design = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]);
        assert!(least_squares(&design, &[1.0, 2.0, 3.0]).is_err());
    }
}
