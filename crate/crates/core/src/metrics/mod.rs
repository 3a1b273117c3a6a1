//! Comparison quantities of the experiments: rotation counts for a target
//! accuracy, errors at a fixed rotation budget, scaling fits, signed error
//! maps and declarative sweeps.

mod fit;
pub use presets::{preset, PRESET_NAMES};
mod heatmap;
pub mod presets;
mod sweep;

pub use fit::{fit_power_law, fit_scaling, PowerFit, ScalingFit, ScalingPoint};
pub use heatmap::{error_heatmap, ErrorHeatmap, HeatmapSummary};
pub use sweep::{
    read_sweep_csv, run_sweep, run_sweep_to_file, sweep_csv_string, BoundViolation, SweepConfig,
    SweepMode, SweepOutcome, SweepRecord, CSV_HEADER, DEFAULT_MAX_SWEEP_QUBITS, WORKERS_ENV,
};

use crate::circuit::{GateCounts, Method};
use crate::encoders::{PreparedEncoding, Retention, SFableScaling, ERROR_TOLERANCE};
use crate::error::{FableError, Result};
use crate::angles::effective_block_from;
use crate::linalg::{hadamard_conjugate, spectral_norm_with, DenseMatrix, SparseMatrix, SpectralOptions};

/// Closed-form error evaluation for one method and one matrix.
///
/// Every approximation is `scale * C * E * C` with `E` the effective block of
/// the retained angles and `C` either the identity or the Hadamard transform,
/// so `|A - approx|_2 = scale * |target - E|_2` with `target = C A C / scale`.
/// Comparing in the angle domain saves a transform per evaluation.
#[derive(Debug, Clone)]
pub struct ErrorEvaluator {
    pub prepared: PreparedEncoding,
    target: DenseMatrix,
    scale: f64,
}

impl ErrorEvaluator {
    pub fn new(method: Method, a: &SparseMatrix) -> Result<Self> {
        Self::with_scaling(method, a, SFableScaling::default())
    }

    pub fn with_scaling(method: Method, a: &SparseMatrix, scaling: SFableScaling) -> Result<Self> {
        Self::from_prepared(PreparedEncoding::prepare_with(method, a, scaling)?, &a.to_dense())
    }

    pub fn from_prepared(prepared: PreparedEncoding, a: &DenseMatrix) -> Result<Self> {
        if a.qubits() != prepared.qubits() {
            return Err(FableError::Dimension(format!(
                "matrix has {} qubits, encoding has {}",
                a.qubits(),
                prepared.qubits()
            )));
        }
        let (target, scale) = match prepared.method {
            Method::Fable => (a.scale(1.0 / prepared.norm), prepared.norm),
            Method::SFable => (hadamard_conjugate(a).scale(1.0 / prepared.norm), prepared.norm),
            Method::LsFable => (hadamard_conjugate(a), 1.0),
        };
        Ok(ErrorEvaluator {
            prepared,
            target,
            scale,
        })
    }

    pub fn method(&self) -> Method {
        self.prepared.method
    }

    /// `|A - approx|_2` for the given retained angles.
    pub fn error(&self, retained: &[(usize, f64)]) -> Result<f64> {
        Ok(self.estimate(retained, None)?.0)
    }

    /// Error if it is below `bound`, `None` once it provably is not.
    pub fn error_below(&self, retained: &[(usize, f64)], bound: f64) -> Result<Option<f64>> {
        let (value, exceeded) = self.estimate(retained, Some(bound))?;
        Ok((!exceeded && value < bound).then_some(value))
    }

    fn estimate(&self, retained: &[(usize, f64)], bound: Option<f64>) -> Result<(f64, bool)> {
        let mut diff = effective_block_from(self.prepared.qubits(), retained);
        for (d, t) in diff.as_mut_slice().iter_mut().zip(self.target.as_slice()) {
            *d = t - *d;
        }
        let mut opts = SpectralOptions::new(ERROR_TOLERANCE);
        opts.stop_above = bound.map(|b| b / self.scale);
        let est = spectral_norm_with(&diff, &opts)?;
        Ok((self.scale * est.value, est.exceeded))
    }

    pub fn error_at(&self, retention: Retention) -> Result<f64> {
        self.error(&self.prepared.retained(retention))
    }
}

/// Outcome of [`rotations_for_accuracy`].
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyResult {
    /// Retained rotations of the smallest circuit found with error below the target.
    pub rotations: usize,
    /// Threshold that realises the circuit (replayable with `--delta`).
    pub delta: f64,
    /// Achieved error.
    pub epsilon: f64,
    /// False when even the complete circuit misses the target; the result
    /// then describes the complete (`delta = 0`) circuit.
    pub reached: bool,
    pub counts: GateCounts,
}

/// Smallest number of rotations whose closed-form error is below `epsilon`.
///
/// Candidates are the cut points of the descending `|theta_hat|` ladder, one
/// per distinct magnitude, so ties are kept or dropped together. The search
/// gallops up the ladder from the empty circuit and then bisects the last
/// bracket; it assumes the error falls monotonically along the ladder, which
/// holds empirically but is not guaranteed.
pub fn rotations_for_accuracy(a: &SparseMatrix, epsilon: f64, method: Method) -> Result<AccuracyResult> {
    let eval = ErrorEvaluator::new(method, a)?;
    rotations_for_accuracy_with(&eval, epsilon)
}

pub fn rotations_for_accuracy_with(eval: &ErrorEvaluator, epsilon: f64) -> Result<AccuracyResult> {
    if eval.method() == Method::LsFable {
        return Err(FableError::Config(
            "LS-FABLE has a fixed circuit; rotations_for_accuracy needs fable or sfable".into(),
        ));
    }
    if !(epsilon > 0.0) {
        return Err(FableError::Config(format!("target error must be positive, got {epsilon}")));
    }
    let prepared = &eval.prepared;
    let mags = prepared.angles.magnitudes_desc();
    // Rotation counts at which the ladder can be cut.
    let mut cuts = vec![0usize];
    for k in 1..=mags.len() {
        if k == mags.len() || mags[k] < mags[k - 1] {
            cuts.push(k);
        }
    }
    let below = |k: usize| eval.error_below(&prepared.retained(Retention::Budget(k)), epsilon);
    let result = |k: usize, err: f64| AccuracyResult {
        rotations: k,
        delta: prepared.realized_delta(Retention::Budget(k)),
        epsilon: err,
        reached: true,
        counts: prepared.gate_counts(Retention::Budget(k)),
    };

    let last = cuts.len() - 1;
    let Some(full_err) = below(cuts[last])? else {
        let full = Retention::Threshold(0.0);
        return Ok(AccuracyResult {
            rotations: prepared.angles.len(),
            delta: 0.0,
            epsilon: eval.error_at(full)?,
            reached: false,
            counts: prepared.gate_counts(full),
        });
    };
    if let Some(err) = below(0)? {
        return Ok(result(0, err));
    }
    // Invariant: cuts[lo] fails, cuts[hi] passes with error hi_err.
    let (mut lo, mut hi, mut hi_err) = (0usize, last, full_err);
    let mut step = 1usize;
    while lo + step < hi {
        match below(cuts[lo + step])? {
            Some(err) => {
                hi = lo + step;
                hi_err = err;
                break;
            }
            None => {
                lo += step;
                step *= 2;
            }
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match below(cuts[mid])? {
            Some(err) => {
                hi = mid;
                hi_err = err;
            }
            None => lo = mid,
        }
    }
    Ok(result(cuts[hi], hi_err))
}

/// Error when only the `budget` largest-magnitude rotations are kept (ties:
/// lower Gray position first). LS-FABLE ignores the budget.
pub fn error_at_budget(a: &SparseMatrix, budget: usize, method: Method) -> Result<f64> {
    let dim = a.dim();
    if budget > dim * dim {
        return Err(FableError::Config(format!(
            "budget {budget} exceeds the {} available rotations",
            dim * dim
        )));
    }
    ErrorEvaluator::new(method, a)?.error_at(Retention::Budget(budget))
}
