//! The `T × D` data table: rows are instances, columns are feature dimensions.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::permutation::PermutationVector;

/// Smallest number of rows for which a ring ordering is non-degenerate.
pub const MIN_ROWS: usize = 3;

/// A finite-valued `T × D` data matrix with at least three rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Array2<f64>,
    column_names: Option<Vec<String>>,
}

impl DataMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows < MIN_ROWS {
            return Err(Error::Shape(format!(
                "data needs at least {MIN_ROWS} rows, got {rows}"
            )));
        }
        if cols == 0 {
            return Err(Error::Shape("data needs at least one column".into()));
        }
        if let Some(((t, d), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Input(format!(
                "entry at row {}, column {} is not finite ({v})",
                t + 1,
                d + 1
            )));
        }
        // Hot loops rely on contiguous row-major storage.
        let values = if values.is_standard_layout() {
            values
        } else {
            values.as_standard_layout().into_owned()
        };
        Ok(Self {
            values,
            column_names: None,
        })
    }

    /// Builds a matrix from a row-major buffer.
    pub fn from_shape_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        let values =
            Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Shape(e.to_string()))?;
        Self::new(values)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((t, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::Shape(format!(
                "row {} has {} entries, expected {cols}",
                t + 1,
                r.len()
            )));
        }
        Self::from_shape_vec(rows.len(), cols, rows.concat())
    }

    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.cols() {
            return Err(Error::Shape(format!(
                "{} column names for {} columns",
                names.len(),
                self.cols()
            )));
        }
        self.column_names = Some(names);
        Ok(self)
    }

    /// Number of instances `T`.
    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    /// Number of feature dimensions `D`.
    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names
            .as_ref()
            .and_then(|names| names.iter().position(|n| n == name))
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[[row, col]]
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let cols = self.cols();
        &self.as_slice()[t * cols..(t + 1) * cols]
    }

    pub fn column(&self, d: usize) -> ArrayView1<'_, f64> {
        self.values.column(d)
    }

    /// Row-major contents.
    pub fn as_slice(&self) -> &[f64] {
        self.values
            .as_slice()
            .expect("DataMatrix is always in standard layout")
    }

    /// Returns the matrix whose row `t` is row `sigma(t)` of `self`, i.e. `P X`.
    pub fn permute_rows(&self, sigma: &PermutationVector) -> Result<Self> {
        if sigma.len() != self.rows() {
            return Err(Error::Shape(format!(
                "permutation of length {} applied to {} rows",
                sigma.len(),
                self.rows()
            )));
        }
        Ok(Self {
            values: self.values.select(Axis(0), sigma.as_slice()),
            column_names: self.column_names.clone(),
        })
    }
}
