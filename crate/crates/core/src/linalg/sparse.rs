use std::collections::HashSet;

use super::dense::DenseMatrix;
use crate::error::{FableError, Result};

/// Real `N x N` matrix with `N = 2^n` in coordinate form.
///
/// Entries are kept sorted by `(row, col)`, contain no duplicates and no
/// stored zeros, so `nnz()` is the nonzero count of the matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn new(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        let dim = 1usize << n;
        let mut seen = HashSet::with_capacity(entries.len());
        for &(row, col, value) in &entries {
            if row >= dim || col >= dim {
                return Err(FableError::Dimension(format!(
                    "entry ({row}, {col}) outside a {dim}x{dim} matrix"
                )));
            }
            if !value.is_finite() {
                return Err(FableError::NonFinite { row, col });
            }
            if value == 0.0 {
                return Err(FableError::Dimension(format!(
                    "explicit zero stored at ({row}, {col})"
                )));
            }
            if !seen.insert((row, col)) {
                return Err(FableError::Dimension(format!(
                    "duplicate entry at ({row}, {col})"
                )));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        Ok(SparseMatrix { n, entries })
    }

    pub fn zeros(n: usize) -> Self {
        SparseMatrix {
            n,
            entries: Vec::new(),
        }
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let dim = m.dim();
        let entries = m
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, &v)| (k / dim, k % dim, v))
            .collect();
        SparseMatrix {
            n: m.qubits(),
            entries,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n);
        for &(r, c, v) in &self.entries {
            m.set(r, c, v);
        }
        m
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Number of nonzero entries, `|A|`.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Average nonzeros per row, `s = |A| / N`.
    pub fn relative_sparsity(&self) -> f64 {
        self.nnz() as f64 / self.dim() as f64
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|e| e.2.abs()).fold(0.0, f64::max)
    }

    /// Applies `f` to every stored value; results equal to zero are dropped.
    pub fn map_values(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> SparseMatrix {
        let entries = self
            .entries
            .iter()
            .map(|&(r, c, v)| (r, c, f(r, c, v)))
            .filter(|e| e.2 != 0.0)
            .collect();
        SparseMatrix { n: self.n, entries }
    }

    pub fn scale(&self, factor: f64) -> SparseMatrix {
        self.map_values(|_, _, v| v * factor)
    }
}
