use std::collections::BTreeMap;

use super::linalg::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{sample_variance, Scalar};

pub type Labels = BTreeMap<String, String>;

/// Drawings × named metrics, with each drawing's group tags.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix<T> {
    row_ids: Vec<String>,
    col_names: Vec<String>,
    values: Matrix<T>,
    labels: Vec<Labels>,
}

impl<T: Scalar> MetricMatrix<T> {
    pub fn new(row_ids: Vec<String>, col_names: Vec<String>, rows: Vec<Vec<T>>, labels: Vec<Labels>) -> Result<Self> {
        if rows.len() != row_ids.len() || labels.len() != row_ids.len() {
            return Err(Error::InvalidArgument(format!(
                "{} row ids, {} value rows and {} label sets",
                row_ids.len(),
                rows.len(),
                labels.len()
            )));
        }
        for (id, row) in row_ids.iter().zip(&rows) {
            if row.len() != col_names.len() {
                return Err(Error::validation(format!(
                    "row '{id}' has {} values for {} columns",
                    row.len(),
                    col_names.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::validation(format!(
                    "row '{id}' has a non-finite value in column '{}'",
                    col_names[j]
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = col_names.iter().find(|c| !seen.insert(c.as_str())) {
            return Err(Error::validation(format!("duplicate column '{dup}'")));
        }
        let values = if rows.is_empty() { Matrix::zeros(0, col_names.len()) } else { Matrix::from_rows(&rows) };
        Ok(Self { row_ids, col_names, values, labels })
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_names.len()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_names(&self) -> &[String] {
        &self.col_names
    }

    pub fn values(&self) -> &Matrix<T> {
        &self.values
    }

    pub fn labels(&self) -> &[Labels] {
        &self.labels
    }

    pub fn label(&self, row: usize, tag: &str) -> Option<&str> {
        self.labels[row].get(tag).map(String::as_str)
    }

    pub fn col_index(&self, name: &str) -> Option<usize> {
        self.col_names.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<T>> {
        self.col_index(name).map(|j| self.values.col(j))
    }

    /// Rejects any column whose sample variance is not strictly positive.
    pub fn check_variance(&self) -> Result<()> {
        for (j, name) in self.col_names.iter().enumerate() {
            let v = sample_variance(&self.values.col(j));
            if !(v > T::zero()) {
                return Err(Error::ZeroVariance(format!("column '{name}'")));
            }
        }
        Ok(())
    }

    pub fn select_columns(&self, names: &[String]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.col_index(n).ok_or_else(|| Error::InvalidArgument(format!("unknown column '{n}'"))))
            .collect::<Result<_>>()?;
        Ok(Self {
            row_ids: self.row_ids.clone(),
            col_names: names.to_vec(),
            values: self.values.select_cols(&idx),
            labels: self.labels.clone(),
        })
    }

    pub fn drop_columns(&self, names: &[String]) -> Self {
        let keep: Vec<String> = self.col_names.iter().filter(|c| !names.contains(c)).cloned().collect();
        self.select_columns(&keep).expect("kept columns exist")
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let data = rows.iter().flat_map(|&i| self.values.row(i).iter().copied()).collect();
        Self {
            row_ids: rows.iter().map(|&i| self.row_ids[i].clone()).collect(),
            col_names: self.col_names.clone(),
            values: Matrix::from_vec(rows.len(), self.n_cols(), data),
            labels: rows.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }

    /// Stacks the rows of `other` (which must have the same columns) below.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.col_names != other.col_names {
            return Err(Error::InvalidArgument("cannot stack matrices with different columns".into()));
        }
        let mut data = self.values.as_slice().to_vec();
        data.extend_from_slice(other.values.as_slice());
        let mut row_ids = self.row_ids.clone();
        row_ids.extend(other.row_ids.iter().cloned());
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(Self {
            values: Matrix::from_vec(row_ids.len(), self.n_cols(), data),
            row_ids,
            col_names: self.col_names.clone(),
            labels,
        })
    }

    pub(crate) fn with_values(&self, col_names: Vec<String>, values: Matrix<T>) -> Self {
        Self { row_ids: self.row_ids.clone(), col_names, values, labels: self.labels.clone() }
    }
}
