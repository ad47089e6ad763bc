use std::collections::BTreeMap;

use itertools::Itertools;

use super::pca::PcaModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Variables whose largest absolute loading reaches `threshold`.
pub fn prune_loadings<T: Scalar>(model: &PcaModel<T>, threshold: T) -> Result<Vec<String>> {
    let kept: Vec<String> = model
        .variables
        .iter()
        .enumerate()
        .filter(|(i, _)| model.loadings.row(*i).iter().any(|l| l.abs() >= threshold))
        .map(|(_, v)| v.clone())
        .collect();
    if kept.is_empty() {
        return Err(Error::Degenerate(format!("every variable loads below {threshold}")));
    }
    Ok(kept)
}

/// Index of the largest absolute value; exact ties go to the lowest index.
pub fn argmax_abs<T: Scalar>(row: &[T]) -> (usize, bool) {
    let mut best = 0;
    let mut tie = false;
    for (j, v) in row.iter().enumerate().skip(1) {
        if v.abs() > row[best].abs() {
            best = j;
            tie = false;
        } else if v.abs() == row[best].abs() {
            tie = true;
        }
    }
    (best, tie)
}

/// Variable → 0-based component carrying its largest absolute loading.
pub fn assign_dimensions<T: Scalar>(model: &PcaModel<T>) -> BTreeMap<String, usize> {
    model
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (j, tie) = argmax_abs(model.loadings.row(i));
            if tie {
                log::warn!("variable '{v}' ties between components; assigned to {}", j + 1);
            }
            (v.clone(), j)
        })
        .collect()
}

const MAX_MATCHED_COMPONENTS: usize = 8;

/// Pairs the components of two models: `perm[j]` is the component of `b`
/// matched to component `j` of `a`. Maximizes the summed absolute cosine
/// similarity of loading columns over the variables both models share, so
/// sign flips are irrelevant.
pub fn match_components<T: Scalar>(a: &PcaModel<T>, b: &PcaModel<T>) -> Result<Vec<usize>> {
    if a.k != b.k {
        return Err(Error::InvalidArgument(format!("models have {} and {} components", a.k, b.k)));
    }
    if a.k > MAX_MATCHED_COMPONENTS {
        return Err(Error::InvalidArgument(format!(
            "component matching supports at most {MAX_MATCHED_COMPONENTS} components"
        )));
    }
    let shared: Vec<(usize, usize)> = a
        .variables
        .iter()
        .enumerate()
        .filter_map(|(i, v)| b.variables.iter().position(|w| w == v).map(|j| (i, j)))
        .collect();
    if shared.is_empty() {
        return Err(Error::Degenerate("models share no variables".into()));
    }
    let k = a.k;
    let mut sim = vec![vec![T::zero(); k]; k];
    for (ja, row) in sim.iter_mut().enumerate() {
        for (jb, cell) in row.iter_mut().enumerate() {
            let (mut dot, mut na, mut nb) = (T::zero(), T::zero(), T::zero());
            for &(ia, ib) in &shared {
                let (x, y) = (a.loadings[(ia, ja)], b.loadings[(ib, jb)]);
                dot = dot + x * y;
                na = na + x * x;
                nb = nb + y * y;
            }
            let denom = (na * nb).sqrt();
            *cell = if denom > T::zero() { (dot / denom).abs() } else { T::zero() };
        }
    }
    let best = (0..k)
        .permutations(k)
        .map(|perm| {
            let score: T = perm.iter().enumerate().map(|(ja, &jb)| sim[ja][jb]).sum();
            (perm, score)
        })
        .fold(None::<(Vec<usize>, T)>, |acc, (perm, score)| match acc {
            Some((_, s)) if s >= score => acc,
            _ => Some((perm, score)),
        })
        .map(|(perm, _)| perm)
        .unwrap_or_default();
    Ok(best)
}

/// Variables that both models assign to the same (matched) component, in
/// the order of `a`.
pub fn consensus_variables<T: Scalar>(a: &PcaModel<T>, b: &PcaModel<T>) -> Result<Vec<String>> {
    let perm = match_components(a, b)?;
    let agreed: Vec<String> = a
        .variables
        .iter()
        .filter(|v| match (a.assignment.get(*v), b.assignment.get(*v)) {
            (Some(&ca), Some(&cb)) => perm[ca] == cb,
            _ => false,
        })
        .cloned()
        .collect();
    if agreed.is_empty() {
        return Err(Error::Degenerate("no variable is assigned to the same dimension in both models".into()));
    }
    Ok(agreed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::linalg::Matrix;

    pub(crate) fn model_with(vars: &[&str], rows: &[Vec<f64>]) -> PcaModel<f64> {
        let k = rows[0].len();
        let loadings = Matrix::from_rows(rows);
        let mut m = PcaModel {
            k,
            variables: vars.iter().map(|s| s.to_string()).collect(),
            row_ids: vec![],
            eigenvalues: vec![],
            unrotated: loadings.clone(),
            loadings,
            rotation: Matrix::identity(k),
            scores: Matrix::zeros(0, k),
            explained: vec![],
            retained: vars.iter().map(|s| s.to_string()).collect(),
            assignment: BTreeMap::new(),
            sweeps: 0,
        };
        m.assignment = assign_dimensions(&m);
        m
    }

    #[test]
    fn pruning_threshold() {
        let m = model_with(
            &["mu", "weak", "zero"],
            &[vec![0.639, -0.373, 0.314], vec![0.2, 0.347, -0.39], vec![0.0, 0.0, 0.0]],
        );
        assert_eq!(prune_loadings(&m, 0.4).unwrap(), vec!["mu".to_string()]);
        let none = model_with(&["zero"], &[vec![0.0, 0.0, 0.0]]);
        assert!(prune_loadings(&none, 0.4).is_err());
    }

    #[test]
    fn assignment_rules() {
        let m = model_with(&["a", "b", "c"], &[vec![0.812, 0.0, 0.0], vec![-0.9, 0.1, 0.1], vec![0.5, 0.5, 0.1]]);
        assert_eq!(m.assignment["a"], 0);
        assert_eq!(m.assignment["b"], 0);
        assert_eq!(m.assignment["c"], 0);
        assert_eq!(argmax_abs(&[0.5, 0.5, 0.1]), (0, true));
        assert_eq!(argmax_abs(&[0.1, -0.7, 0.5]), (1, false));
    }

    #[test]
    fn sign_flips_do_not_change_assignment() {
        let rows = vec![vec![0.7, 0.2, -0.1], vec![0.1, -0.8, 0.3], vec![0.2, 0.1, 0.9]];
        let flipped: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0], -r[1], r[2]]).collect();
        let a = model_with(&["x", "y", "z"], &rows);
        let b = model_with(&["x", "y", "z"], &flipped);
        assert_eq!(a.assignment, b.assignment);
    }

    #[test]
    fn consensus_with_permuted_and_inverted_components() {
        let a = model_with(
            &["mu", "speed", "colours", "hurst"],
            &[vec![0.8, 0.1, 0.0], vec![-0.9, 0.0, 0.1], vec![0.1, 0.8, 0.0], vec![0.0, 0.1, 0.9]],
        );
        // Same structure, components permuted (2,0,1) and the first inverted.
        let b = model_with(
            &["mu", "speed", "colours", "hurst"],
            &[vec![0.0, -0.8, 0.1], vec![0.1, 0.9, 0.0], vec![0.0, -0.1, 0.8], vec![0.9, 0.0, 0.1]],
        );
        assert_eq!(match_components(&a, &b).unwrap(), vec![1, 2, 0]);
        assert_eq!(consensus_variables(&a, &b).unwrap().len(), 4);
        assert_eq!(consensus_variables(&a, &a).unwrap(), a.variables);
    }

    #[test]
    fn disjoint_assignments_error() {
        let a = model_with(&["x", "y"], &[vec![0.9, 0.0], vec![0.0, 0.9]]);
        let b = model_with(&["x", "y"], &[vec![0.9, 0.0], vec![0.9, 0.0]]);
        let c = model_with(&["x", "y"], &[vec![0.0, 0.9], vec![0.0, 0.9]]);
        // b puts both on one component; the matched partner of a's components
        // cannot agree on both, but one variable still matches.
        assert_eq!(consensus_variables(&a, &b).unwrap().len(), 1);
        let d = model_with(&["p", "q"], &[vec![0.9, 0.0], vec![0.0, 0.9]]);
        assert!(consensus_variables(&a, &d).is_err());
        assert!(consensus_variables(&c, &c).is_ok());
    }
}
