//! Signed entrywise error maps.

use crate::circuit::Method;
use crate::encoders::{PreparedEncoding, Retention};
use crate::error::{FableError, Result};
use crate::linalg::{DenseMatrix, SparseMatrix};

/// Largest matrix the heatmap accepts (the map itself is dense).
pub const MAX_HEATMAP_QUBITS: usize = 10;

/// Sign counts of `A - approx`. Positive errors are underestimates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HeatmapSummary {
    pub underestimated: usize,
    pub overestimated: usize,
    pub exact: usize,
    pub support_underestimated: usize,
    pub support_overestimated: usize,
    pub off_support_underestimated: usize,
    pub off_support_overestimated: usize,
}

impl HeatmapSummary {
    pub fn cells(&self) -> usize {
        self.underestimated + self.overestimated + self.exact
    }

    pub fn underestimated_fraction(&self) -> f64 {
        self.underestimated as f64 / self.cells().max(1) as f64
    }
}

#[derive(Debug, Clone)]
pub struct ErrorHeatmap {
    /// `A - approx`, entrywise.
    pub errors: DenseMatrix,
    pub summary: HeatmapSummary,
}

/// Entrywise `A - approx` for `method` under `retention` (LS-FABLE ignores it).
pub fn error_heatmap(a: &SparseMatrix, method: Method, retention: Retention) -> Result<ErrorHeatmap> {
    if a.qubits() > MAX_HEATMAP_QUBITS {
        return Err(FableError::Resource(format!(
            "error heatmaps are limited to n <= {MAX_HEATMAP_QUBITS}, got n = {}",
            a.qubits()
        )));
    }
    let prepared = PreparedEncoding::prepare(method, a)?;
    let approx = prepared.approximation(&prepared.retained(retention));
    let dense = a.to_dense();
    let errors = dense.sub(&approx)?;
    let mut summary = HeatmapSummary::default();
    for r in 0..dense.dim() {
        for c in 0..dense.dim() {
            let e = errors.get(r, c);
            let on_support = dense.get(r, c) != 0.0;
            if e > 0.0 {
                summary.underestimated += 1;
                if on_support {
                    summary.support_underestimated += 1;
                } else {
                    summary.off_support_underestimated += 1;
                }
            } else if e < 0.0 {
                summary.overestimated += 1;
                if on_support {
                    summary.support_overestimated += 1;
                } else {
                    summary.off_support_overestimated += 1;
                }
            } else {
                summary.exact += 1;
            }
        }
    }
    Ok(ErrorHeatmap { errors, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_uniform_sparse;

    #[test]
    fn exact_fable_has_negligible_errors() {
        let a = gen_uniform_sparse(3, 2.0, 4).unwrap();
        let map = error_heatmap(&a, Method::Fable, Retention::Threshold(0.0)).unwrap();
        assert!(map.errors.as_slice().iter().all(|e| e.abs() < 1e-12));
        assert_eq!(map.summary.cells(), 64);
        let s = map.summary;
        assert_eq!(
            s.support_underestimated + s.support_overestimated + s.off_support_underestimated
                + s.off_support_overestimated + s.exact,
            64
        );
    }

    #[test]
    fn size_guard() {
        let a = SparseMatrix::new(11, vec![(0, 0, 1.0)]).unwrap();
        assert!(matches!(
            error_heatmap(&a, Method::LsFable, Retention::Threshold(0.0)),
            Err(FableError::Resource(_))
        ));
    }
}
