use crate::error::{FableError, Result};

/// Real `N x N` matrix with `N = 2^n`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Returns `log2(len)` when `len` is a positive power of two.
pub fn log2_exact(len: usize) -> Option<usize> {
    if len.is_power_of_two() {
        Some(len.trailing_zeros() as usize)
    } else {
        None
    }
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        let dim = 1usize << n;
        DenseMatrix {
            n,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        let dim = m.dim();
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let dim = 1usize << n;
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        DenseMatrix { n, data }
    }

    /// Builds a matrix from row-major data, checking shape and finiteness.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        let dim = 1usize << n;
        if data.len() != dim * dim {
            return Err(FableError::Dimension(format!(
                "expected {} entries for a {dim}x{dim} matrix, found {}",
                dim * dim,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(FableError::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(DenseMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = log2_exact(rows.len()).ok_or_else(|| {
            FableError::Dimension(format!("{} rows is not a power of two", rows.len()))
        })?;
        let mut data = Vec::with_capacity(rows.len() * rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != rows.len() {
                return Err(FableError::Dimension(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    rows.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(n, data)
    }

    /// Qubit count `n`.
    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Dimension `N = 2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        let dim = self.dim();
        self.data[row * dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let dim = self.dim();
        &self.data[row * dim..(row + 1) * dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim()).map(<[f64]>::to_vec).collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> DenseMatrix {
        self.map(|v| v * factor)
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        Ok(DenseMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let dim = self.dim();
        DenseMatrix::from_fn(self.n, |i, j| self.data[j * dim + i])
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let dim = self.dim();
        let mut out = vec![0.0; dim * dim];
        for i in 0..dim {
            let out_row = &mut out[i * dim..(i + 1) * dim];
            for k in 0..dim {
                let a = self.data[i * dim + k];
                if a == 0.0 {
                    continue;
                }
                let other_row = &other.data[k * dim..(k + 1) * dim];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(DenseMatrix { n: self.n, data: out })
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (yi, row) in y.iter_mut().zip(self.data.chunks_exact(self.dim())) {
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `y = M^T x`.
    pub fn matvec_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for (xi, row) in x.iter().zip(self.data.chunks_exact(self.dim())) {
            if *xi == 0.0 {
                continue;
            }
            for (yj, a) in y.iter_mut().zip(row) {
                *yj += xi * a;
            }
        }
    }

    fn check_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(FableError::Dimension(format!(
                "shape mismatch: {0}x{0} vs {1}x{1}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}
