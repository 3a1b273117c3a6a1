//! End-to-end FABLE, S-FABLE and LS-FABLE pipelines.

use crate::angles::{angles_of, effective_block_from, ls_angles, transform_angles, AngleSet};
use crate::circuit::{
    assemble_fable, assemble_sfable, build_oracle, build_sparse_oracle, oracle_counts,
    oracle_from_retained, Circuit, GateCounts, Method,
};
use serde::{Deserialize, Serialize};

use crate::error::{FableError, Result};
use crate::linalg::{
    hadamard_conjugate, max_abs_entry, spectral_norm, DenseMatrix, SparseMatrix,
};

pub use crate::circuit::Method as EncodingMethod;

/// Tolerance of the spectral-norm estimate behind every reported error.
pub const ERROR_TOLERANCE: f64 = 1e-8;

/// How S-FABLE brings `HAH` into the `[-1, 1]` domain of the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SFableScaling {
    /// Divide by `max|HAH|` only when it exceeds 1, so `nu = max(1, max|HAH|)`.
    #[default]
    WhenNeeded,
    /// Always divide by `max|HAH|`.
    MaxEntry,
}

impl std::str::FromStr for SFableScaling {
    type Err = FableError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "when_needed" => Ok(SFableScaling::WhenNeeded),
            "max_entry" => Ok(SFableScaling::MaxEntry),
            _ => Err(FableError::Config(format!(
                "unknown S-FABLE scaling {s:?} (expected when-needed or max-entry)"
            ))),
        }
    }
}

/// Which transformed angles an encoding keeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Retention {
    /// Keep every angle with `|theta_hat| >= delta`; `delta = 0` keeps the
    /// full oracle including zero angles.
    Threshold(f64),
    /// Keep the `k` largest-magnitude angles (ties: lower Gray position).
    Budget(usize),
}

/// Angles of one method applied to one matrix, ready to be truncated,
/// evaluated in closed form or turned into a circuit.
#[derive(Debug, Clone)]
pub struct PreparedEncoding {
    pub method: Method,
    pub angles: AngleSet,
    /// Factor divided out of the encoded matrix before taking angles:
    /// `nu` for S-FABLE (see [`SFableScaling`]), the rescale factor for a
    /// rescaled FABLE input, otherwise 1.
    pub norm: f64,
}

impl PreparedEncoding {
    /// FABLE on a dense matrix whose entries lie in `[-1, 1]`.
    pub fn fable(a: &DenseMatrix) -> Result<Self> {
        Ok(PreparedEncoding {
            method: Method::Fable,
            angles: transform_angles(&angles_of(a)?)?,
            norm: 1.0,
        })
    }

    /// FABLE on `A / max|a_ij|`, with the factor folded into `alpha`.
    pub fn fable_rescaled(a: &DenseMatrix) -> Result<Self> {
        let norm = max_abs_entry(a);
        if norm == 0.0 {
            return Self::fable(a);
        }
        Ok(PreparedEncoding {
            method: Method::Fable,
            angles: transform_angles(&angles_of(&a.scale(1.0 / norm))?)?,
            norm,
        })
    }

    pub fn sfable(a: &SparseMatrix) -> Result<Self> {
        Self::sfable_dense(&a.to_dense(), SFableScaling::default())
    }

    pub fn sfable_dense(a: &DenseMatrix, scaling: SFableScaling) -> Result<Self> {
        let b = hadamard_conjugate(a);
        let max = max_abs_entry(&b);
        if max == 0.0 {
            return Err(FableError::DegenerateNorm(
                "S-FABLE needs a nonzero matrix (max |HAH| = 0)".into(),
            ));
        }
        let norm = match scaling {
            SFableScaling::WhenNeeded => max.max(1.0),
            SFableScaling::MaxEntry => max,
        };
        Ok(PreparedEncoding {
            method: Method::SFable,
            angles: transform_angles(&angles_of(&b.scale(1.0 / norm))?)?,
            norm,
        })
    }

    pub fn lsfable(a: &SparseMatrix) -> Result<Self> {
        if a.nnz() == 0 {
            return Err(FableError::DegenerateNorm(
                "LS-FABLE needs a nonzero matrix".into(),
            ));
        }
        Ok(PreparedEncoding {
            method: Method::LsFable,
            angles: ls_angles(a)?,
            norm: 1.0,
        })
    }

    pub fn prepare(method: Method, a: &SparseMatrix) -> Result<Self> {
        Self::prepare_with(method, a, SFableScaling::default())
    }

    pub fn prepare_with(method: Method, a: &SparseMatrix, scaling: SFableScaling) -> Result<Self> {
        match method {
            Method::Fable => Self::fable(&a.to_dense()),
            Method::SFable => Self::sfable_dense(&a.to_dense(), scaling),
            Method::LsFable => Self::lsfable(a),
        }
    }

    pub fn qubits(&self) -> usize {
        self.angles.qubits()
    }

    /// Subnormalisation: the circuit's block is `alpha * A`.
    pub fn alpha(&self) -> f64 {
        1.0 / ((1u64 << self.qubits()) as f64 * self.norm)
    }

    /// Retained `(gray_position, angle)` entries. LS-FABLE always keeps its
    /// whole (sparse) angle set.
    pub fn retained(&self, retention: Retention) -> Vec<(usize, f64)> {
        match (self.method, retention) {
            (Method::LsFable, _) => self.angles.entries().collect(),
            (_, Retention::Threshold(delta)) => self.angles.retained_by_threshold(delta),
            (_, Retention::Budget(k)) => self.angles.retained_top(k),
        }
    }

    /// Closed-form approximation of `A` carried by the retained entries,
    /// i.e. the circuit's block divided by `alpha`.
    pub fn approximation(&self, retained: &[(usize, f64)]) -> DenseMatrix {
        let block = effective_block_from(self.qubits(), retained);
        match self.method {
            Method::Fable => {
                if self.norm == 1.0 {
                    block
                } else {
                    block.scale(self.norm)
                }
            }
            Method::SFable => hadamard_conjugate(&block).scale(self.norm),
            Method::LsFable => hadamard_conjugate(&block),
        }
    }

    /// The threshold realising `retention` for reporting: the threshold
    /// itself, or the midpoint between the last kept and first dropped
    /// magnitude for a budget.
    pub fn realized_delta(&self, retention: Retention) -> f64 {
        match (self.method, retention) {
            (Method::LsFable, _) => 0.0,
            (_, Retention::Threshold(d)) => d.max(0.0),
            (_, Retention::Budget(k)) => {
                let mags = self.angles.magnitudes_desc();
                match (k.checked_sub(1).and_then(|i| mags.get(i)), mags.get(k)) {
                    (Some(&kept), Some(&dropped)) => 0.5 * (kept + dropped),
                    (Some(&kept), None) => 0.5 * kept,
                    (None, Some(&first)) => 2.0 * first,
                    (None, None) => 0.0,
                }
            }
        }
    }

    /// Assembled circuit for `retention`.
    pub fn circuit(&self, retention: Retention) -> Result<Circuit> {
        let n = self.qubits();
        let oracle = match (self.method, retention) {
            (Method::LsFable, _) => build_sparse_oracle(&self.angles),
            (_, Retention::Threshold(delta)) => build_oracle(&self.angles, delta),
            (_, Retention::Budget(k)) => oracle_from_retained(n, &self.angles.retained_top(k)),
        };
        let mut c = match self.method {
            Method::Fable => {
                let mut c = assemble_fable(&oracle, n)?;
                c.meta.alpha = self.alpha();
                c
            }
            Method::SFable => assemble_sfable(&oracle, n, self.norm)?,
            Method::LsFable => {
                let mut c = assemble_sfable(&oracle, n, 1.0)?;
                c.meta.method = Some(Method::LsFable);
                c
            }
        };
        c.meta.delta = self.realized_delta(retention);
        Ok(c)
    }

    /// Gate counts (SWAPs expanded) of [`Self::circuit`] without building it.
    pub fn gate_counts(&self, retention: Retention) -> GateCounts {
        let n = self.qubits();
        let (rotations, cnots) = match (self.method, retention) {
            (Method::Fable | Method::SFable, Retention::Threshold(d)) if d <= 0.0 => {
                let len = self.angles.len();
                (len, len)
            }
            _ => oracle_counts(self.retained(retention).into_iter().map(|e| e.0)),
        };
        let hadamards = match self.method {
            Method::Fable => 2 * n,
            Method::SFable | Method::LsFable => 4 * n,
        };
        GateCounts::new(rotations, cnots + 3 * n, hadamards, 0)
    }
}

/// A circuit together with its block-encoding parameters.
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    pub method: Method,
    pub circuit: Circuit,
    /// The block of `circuit` approximates `alpha * A`.
    pub alpha: f64,
    /// Ancilla qubits: `n + 1`.
    pub ancillas: usize,
    pub delta: f64,
    /// Closed-form approximation of `A` (the circuit's block divided by `alpha`).
    pub predicted_block: DenseMatrix,
}

impl BlockEncoding {
    pub fn from_prepared(prepared: &PreparedEncoding, retention: Retention) -> Result<Self> {
        let circuit = prepared.circuit(retention)?;
        let retained = prepared.retained(retention);
        Ok(BlockEncoding {
            method: prepared.method,
            alpha: prepared.alpha(),
            ancillas: prepared.qubits() + 1,
            delta: circuit.meta.delta,
            predicted_block: prepared.approximation(&retained),
            circuit,
        })
    }

    pub fn qubits(&self) -> usize {
        self.ancillas - 1
    }
}

pub fn fable_encode(a: &DenseMatrix, delta: f64) -> Result<BlockEncoding> {
    BlockEncoding::from_prepared(&PreparedEncoding::fable(a)?, Retention::Threshold(delta))
}

pub fn sfable_encode(a: &SparseMatrix, delta: f64) -> Result<BlockEncoding> {
    BlockEncoding::from_prepared(&PreparedEncoding::sfable(a)?, Retention::Threshold(delta))
}

pub fn lsfable_encode(a: &SparseMatrix) -> Result<BlockEncoding> {
    BlockEncoding::from_prepared(&PreparedEncoding::lsfable(a)?, Retention::Threshold(0.0))
}

/// `|| A - predicted_block ||_2`, the block-encoding error of `enc`.
pub fn encoding_error(a: &DenseMatrix, enc: &BlockEncoding) -> Result<f64> {
    spectral_norm(&a.sub(&enc.predicted_block)?, ERROR_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::count_gates;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_matrix_collapses_to_one_angle() {
        let a = DenseMatrix::zeros(2);
        let enc = fable_encode(&a, 0.0).unwrap();
        assert!(enc.predicted_block.as_slice().iter().all(|v| v.abs() < 1e-15));
        let prepared = PreparedEncoding::fable(&a).unwrap();
        assert_eq!(prepared.angles.entries().collect::<Vec<_>>(), vec![(0, FRAC_PI_2)]);
        let compressed = prepared.circuit(Retention::Threshold(1e-9)).unwrap();
        assert_eq!(count_gates(&compressed, true).rotations, 1);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            sfable_encode(&SparseMatrix::zeros(2), 0.0),
            Err(FableError::DegenerateNorm(_))
        ));
        assert!(lsfable_encode(&SparseMatrix::zeros(2)).is_err());
        let big = DenseMatrix::from_fn(1, |_, _| 2.0);
        assert!(matches!(fable_encode(&big, 0.0), Err(FableError::Domain { .. })));
    }

    #[test]
    fn identity_sfable() {
        let a = SparseMatrix::from_dense(&DenseMatrix::identity(2));
        let enc = sfable_encode(&a, 0.0).unwrap();
        assert!((enc.alpha - 0.25).abs() < 1e-15);
        assert!(encoding_error(&a.to_dense(), &enc).unwrap() < 1e-10);
    }

    #[test]
    fn single_entry_lsfable_uses_two_rotations() {
        let a = SparseMatrix::new(2, vec![(1, 2, 0.5)]).unwrap();
        let enc = lsfable_encode(&a).unwrap();
        assert_eq!(count_gates(&enc.circuit, true).rotations, 2);
        assert_eq!(enc.ancillas, 3);
        assert_eq!(enc.alpha, 0.25);
    }

    #[test]
    fn rescaled_fable_folds_factor_into_alpha() {
        let a = DenseMatrix::from_fn(2, |i, j| (i as f64 - j as f64) * 1.5);
        let p = PreparedEncoding::fable_rescaled(&a).unwrap();
        assert!((p.norm - 4.5).abs() < 1e-15);
        assert!((p.alpha() - 1.0 / 18.0).abs() < 1e-15);
        let enc = BlockEncoding::from_prepared(&p, Retention::Threshold(0.0)).unwrap();
        assert!(encoding_error(&a, &enc).unwrap() < 1e-10);
    }

    #[test]
    fn counts_without_circuit_match_circuit() {
        let a = SparseMatrix::new(3, vec![(0, 1, 0.5), (3, 3, -0.25), (7, 2, 0.9), (5, 5, 0.1)]).unwrap();
        for method in Method::ALL {
            let p = PreparedEncoding::prepare(method, &a).unwrap();
            for r in [Retention::Threshold(0.0), Retention::Threshold(0.01), Retention::Budget(4)] {
                assert_eq!(p.gate_counts(r), count_gates(&p.circuit(r).unwrap(), true), "{method} {r:?}");
            }
        }
    }

    #[test]
    fn sfable_scaling_modes() {
        let a = SparseMatrix::new(3, vec![(0, 1, 0.5), (6, 2, -0.75)]).unwrap();
        let lazy = PreparedEncoding::sfable(&a).unwrap();
        assert_eq!(lazy.norm, 1.0);
        assert_eq!(lazy.alpha(), 0.125);
        let strict = PreparedEncoding::sfable_dense(&a.to_dense(), SFableScaling::MaxEntry).unwrap();
        let max = max_abs_entry(&hadamard_conjugate(&a.to_dense()));
        assert!(max < 1.0);
        assert_eq!(strict.norm, max);
        for p in [lazy, strict] {
            let enc = BlockEncoding::from_prepared(&p, Retention::Threshold(0.0)).unwrap();
            assert!(encoding_error(&a.to_dense(), &enc).unwrap() < 1e-10);
        }
        // Large entries in HAH force the division in both modes.
        let big = SparseMatrix::from_dense(&DenseMatrix::from_fn(2, |_, _| 1.0));
        assert_eq!(PreparedEncoding::sfable(&big).unwrap().norm, 4.0);
        assert_eq!("max-entry".parse::<SFableScaling>().unwrap(), SFableScaling::MaxEntry);
    }

    #[test]
    fn budget_delta_is_a_midpoint() {
        let a = SparseMatrix::new(2, vec![(0, 1, 0.5), (3, 3, -0.25)]).unwrap();
        let p = PreparedEncoding::sfable(&a).unwrap();
        let mags = p.angles.magnitudes_desc();
        let d = p.realized_delta(Retention::Budget(2));
        assert!(d < mags[1] && d > mags[2]);
        assert_eq!(
            p.angles.retained_by_threshold(d).len(),
            p.retained(Retention::Budget(2)).len()
        );
    }
}
