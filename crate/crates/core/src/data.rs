use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// One data source: `n` observations (rows) of `d` variables (columns),
/// with optional row identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct DataView {
    values: DMatrix<f64>,
    ids: Option<Vec<String>>,
}

impl DataView {
    pub fn new(values: DMatrix<f64>) -> Self {
        DataView { values, ids: None }
    }

    /// Build from row vectors. All rows must share one length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::InvalidData(format!(
                "row {bad} has {} columns, expected {d}",
                rows[bad].len()
            )));
        }
        Ok(Self::new(DMatrix::from_fn(n, d, |i, j| rows[i][j])))
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.nrows() {
            return Err(Error::InvalidData(format!(
                "{} row ids for {} rows",
                ids.len(),
                self.nrows()
            )));
        }
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    /// Copy of row `i`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }

    /// Rows as contiguous vectors, which is the access pattern every kernel wants.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.nrows()).map(|i| self.row(i)).collect()
    }

    /// Rows `idx`, in the given order, keeping ids.
    pub fn select_rows(&self, idx: &[usize]) -> DataView {
        let values = self.values.select_rows(idx);
        let ids = self
            .ids
            .as_ref()
            .map(|ids| idx.iter().map(|&i| ids[i].clone()).collect());
        DataView { values, ids }
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(k) => {
                let (i, j) = (k % self.nrows(), k / self.nrows());
                Err(Error::InvalidData(format!(
                    "non-finite value at row {i}, column {j}"
                )))
            }
        }
    }
}

impl From<DMatrix<f64>> for DataView {
    fn from(values: DMatrix<f64>) -> Self {
        DataView::new(values)
    }
}
