//! Group comparisons: Mann-Whitney, Kruskal-Wallis, one-way ANOVA, Welch's
//! t, and Holm-corrected pairwise post-hoc tests.

use serde::{Deserialize, Serialize};

use super::special::{chi2_sf, f_sf, normal_two_sided, student_t_two_sided};
use crate::error::{Error, Result};
use crate::scalar::{mean, sample_variance, Scalar};

/// Largest combined sample size for which Mann-Whitney enumerates the null
/// distribution exactly (ties force the normal approximation).
pub const EXACT_MW_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statistic {
    W,
    H,
    F,
    #[serde(rename = "t")]
    T,
    #[serde(rename = "r")]
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Exact,
    NormalApprox,
    ChiSquare,
    FDist,
    StudentT,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult<T> {
    pub statistic: Statistic,
    pub value: T,
    pub df: Option<T>,
    /// Denominator degrees of freedom for F.
    pub df2: Option<T>,
    /// Two-sided.
    pub p_value: T,
    pub method: PValueMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosthocMethod {
    #[default]
    MannWhitney,
    WelchT,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseComparison<T> {
    pub group_a: usize,
    pub group_b: usize,
    pub test: TestResult<T>,
    pub p_holm: T,
}

/// Average ranks (1-based) and the tie-group sizes.
pub fn average_ranks<T: Scalar>(values: &[T]) -> (Vec<T>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![T::zero(); values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        let avg = T::of_usize(i + j + 1) / T::of(2.0);
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

fn tie_sum(ties: &[usize]) -> f64 {
    ties.iter().map(|&t| (t * t * t - t) as f64).sum()
}

/// Number of rank splits giving each value of U, for sizes (n1, n2).
fn mann_whitney_counts(n1: usize, n2: usize) -> Vec<f64> {
    // counts[a][b][u]: arrangements of a + b items with statistic u.
    let max_u = n1 * n2;
    let mut counts = vec![vec![vec![0f64; max_u + 1]; n2 + 1]; n1 + 1];
    for a in 0..=n1 {
        for b in 0..=n2 {
            if a == 0 || b == 0 {
                counts[a][b][0] = 1.0;
                continue;
            }
            for u in 0..=a * b {
                // Largest item from sample 1 exceeds all b items of sample 2.
                let from_a = if u >= b { counts[a - 1][b][u - b] } else { 0.0 };
                let from_b = counts[a][b - 1][u];
                counts[a][b][u] = from_a + from_b;
            }
        }
    }
    std::mem::take(&mut counts[n1][n2])
}

/// Wilcoxon rank-sum test. W is the rank sum of `a` minus its minimum.
pub fn mann_whitney<T: Scalar>(a: &[T], b: &[T]) -> Result<TestResult<T>> {
    let (n1, n2) = (a.len(), b.len());
    if n1 == 0 || n2 == 0 {
        return Err(Error::InsufficientData("Mann-Whitney needs two non-empty samples".into()));
    }
    if n1 + n2 < 3 {
        return Err(Error::InsufficientData("Mann-Whitney needs at least 3 observations".into()));
    }
    let combined: Vec<T> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = average_ranks(&combined);
    let r1: T = ranks[..n1].iter().copied().sum();
    let w = r1 - T::of_usize(n1 * (n1 + 1)) / T::of(2.0);
    let n = n1 + n2;
    let expected = T::of_usize(n1 * n2) / T::of(2.0);

    if n <= EXACT_MW_MAX_N && ties.is_empty() {
        let counts = mann_whitney_counts(n1, n2);
        let total: f64 = counts.iter().sum();
        let wi = w.to_f64_lossy().round() as usize;
        let lower: f64 = counts[..=wi].iter().sum::<f64>() / total;
        let upper: f64 = counts[wi..].iter().sum::<f64>() / total;
        let p = (2.0 * lower.min(upper)).min(1.0);
        return Ok(TestResult {
            statistic: Statistic::W,
            value: w,
            df: None,
            df2: None,
            p_value: T::of(p),
            method: PValueMethod::Exact,
        });
    }

    let nf = n as f64;
    let var = (n1 * n2) as f64 / 12.0 * ((nf + 1.0) - tie_sum(&ties) / (nf * (nf - 1.0)));
    let d = (w - expected).abs();
    let p = if var <= 0.0 {
        T::one()
    } else {
        let corrected = if d > T::zero() { (d - T::of(0.5)).abs() } else { T::zero() };
        normal_two_sided(corrected / T::of(var.sqrt())).min(T::one())
    };
    Ok(TestResult {
        statistic: Statistic::W,
        value: w,
        df: None,
        df2: None,
        p_value: p,
        method: PValueMethod::NormalApprox,
    })
}

fn check_groups<T>(groups: &[Vec<T>]) -> Result<()> {
    if groups.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 groups, got {}", groups.len())));
    }
    if let Some(i) = groups.iter().position(|g| g.len() < 2) {
        return Err(Error::InsufficientData(format!(
            "group {i} has {} observations; at least 2 are needed",
            groups[i].len()
        )));
    }
    Ok(())
}

/// Kruskal-Wallis H with tie correction; chi-square p with k - 1 dof.
pub fn kruskal_wallis<T: Scalar>(groups: &[Vec<T>]) -> Result<TestResult<T>> {
    check_groups(groups)?;
    let combined: Vec<T> = groups.iter().flatten().copied().collect();
    let n = combined.len();
    let (ranks, ties) = average_ranks(&combined);
    let nf = n as f64;
    let correction = 1.0 - tie_sum(&ties) / (nf * nf * nf - nf);
    if correction <= 0.0 {
        return Err(Error::ZeroVariance("Kruskal-Wallis: every observation is tied".into()));
    }
    let mut offset = 0;
    let mut sum = T::zero();
    for g in groups {
        let r: T = ranks[offset..offset + g.len()].iter().copied().sum();
        sum = sum + r * r / T::of_usize(g.len());
        offset += g.len();
    }
    let h = (T::of(12.0) / T::of(nf * (nf + 1.0)) * sum - T::of(3.0 * (nf + 1.0))) / T::of(correction);
    let df = T::of_usize(groups.len() - 1);
    Ok(TestResult {
        statistic: Statistic::H,
        value: h,
        df: Some(df),
        df2: None,
        p_value: chi2_sf(h, df),
        method: PValueMethod::ChiSquare,
    })
}

pub fn anova_oneway<T: Scalar>(groups: &[Vec<T>]) -> Result<TestResult<T>> {
    check_groups(groups)?;
    let all: Vec<T> = groups.iter().flatten().copied().collect();
    let grand = mean(&all);
    let (k, n) = (groups.len(), all.len());
    let mut ssb = T::zero();
    let mut ssw = T::zero();
    for g in groups {
        let m = mean(g);
        ssb = ssb + T::of_usize(g.len()) * (m - grand) * (m - grand);
        ssw = ssw + g.iter().map(|&v| (v - m) * (v - m)).sum::<T>();
    }
    let (df1, df2) = (T::of_usize(k - 1), T::of_usize(n - k));
    if ssw == T::zero() && ssb == T::zero() {
        return Err(Error::ZeroVariance("ANOVA: every observation is identical".into()));
    }
    let f = if ssw == T::zero() { T::infinity() } else { (ssb / df1) / (ssw / df2) };
    Ok(TestResult {
        statistic: Statistic::F,
        value: f,
        df: Some(df1),
        df2: Some(df2),
        p_value: f_sf(f, df1, df2),
        method: PValueMethod::FDist,
    })
}

/// Welch's unequal-variance t test.
pub fn welch_t<T: Scalar>(a: &[T], b: &[T]) -> Result<TestResult<T>> {
    check_groups(&[a.to_vec(), b.to_vec()])?;
    let (na, nb) = (T::of_usize(a.len()), T::of_usize(b.len()));
    let (va, vb) = (sample_variance(a) / na, sample_variance(b) / nb);
    let diff = mean(a) - mean(b);
    let se2 = va + vb;
    if se2 == T::zero() {
        if diff == T::zero() {
            return Err(Error::ZeroVariance("Welch t: both samples constant and equal".into()));
        }
        return Ok(TestResult {
            statistic: Statistic::T,
            value: diff.signum() * T::infinity(),
            df: Some(na + nb - T::of(2.0)),
            df2: None,
            p_value: T::zero(),
            method: PValueMethod::StudentT,
        });
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - T::one()) + vb * vb / (nb - T::one()));
    Ok(TestResult {
        statistic: Statistic::T,
        value: t,
        df: Some(df),
        df2: None,
        p_value: student_t_two_sided(t, df),
        method: PValueMethod::StudentT,
    })
}

/// Holm step-down adjustment, returned in input order.
pub fn holm<T: Scalar>(p: &[T]) -> Vec<T> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut adjusted = vec![T::zero(); m];
    let mut running = T::zero();
    for (rank, &i) in order.iter().enumerate() {
        let v = (T::of_usize(m - rank) * p[i]).min(T::one());
        running = running.max(v);
        adjusted[i] = running;
    }
    adjusted
}

/// All pairwise comparisons with Holm-adjusted p-values.
pub fn posthoc_pairwise<T: Scalar>(groups: &[Vec<T>], method: PosthocMethod) -> Result<Vec<PairwiseComparison<T>>> {
    check_groups(groups)?;
    let mut out = Vec::new();
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            let test = match method {
                PosthocMethod::MannWhitney => mann_whitney(&groups[i], &groups[j])?,
                PosthocMethod::WelchT => match welch_t(&groups[i], &groups[j]) {
                    Ok(t) => t,
                    Err(Error::ZeroVariance(_)) => TestResult {
                        statistic: Statistic::T,
                        value: T::zero(),
                        df: None,
                        df2: None,
                        p_value: T::one(),
                        method: PValueMethod::StudentT,
                    },
                    Err(e) => return Err(e),
                },
            };
            out.push(PairwiseComparison { group_a: i, group_b: j, test, p_holm: T::zero() });
        }
    }
    let adjusted = holm(&out.iter().map(|c| c.test.p_value).collect::<Vec<_>>());
    for (c, p) in out.iter_mut().zip(adjusted) {
        c.p_holm = p;
    }
    Ok(out)
}
