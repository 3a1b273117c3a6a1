//! Python bindings: `import pyfable`.
//!
//! Matrices cross the boundary as lists of rows (anything a NumPy array's
//! `tolist()` produces).

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fable_core::circuit::{count_gates, emit_text, parse_text};
use fable_core::generators::{Family, GenSpec};
use fable_core::linalg;
use fable_core::metrics::{self, ErrorEvaluator};
use fable_core::simulator;
use fable_core::{
    encoding_error, BlockEncoding, DenseMatrix, FableError, GateCounts, Method, PreparedEncoding,
    Retention, SFableScaling, SparseMatrix,
};

fn to_py(e: FableError) -> PyErr {
    match e {
        FableError::Io { .. } | FableError::Csv { .. } => PyOSError::new_err(e.to_string()),
        FableError::NonConvergence { .. } | FableError::Resource(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn dense(rows: &[Vec<f64>]) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(rows).map_err(to_py)
}

fn method(name: &str) -> PyResult<Method> {
    name.parse().map_err(to_py)
}

fn counts_dict<'py>(py: Python<'py>, c: GateCounts) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("rotations", c.rotations)?;
    d.set_item("cnots", c.cnots)?;
    d.set_item("hadamards", c.hadamards)?;
    d.set_item("swaps", c.swaps)?;
    d.set_item("total", c.total)?;
    Ok(d)
}

fn retention(delta: Option<f64>, budget: Option<usize>) -> PyResult<Retention> {
    match (delta, budget) {
        (Some(_), Some(_)) => Err(PyValueError::new_err("pass delta or budget, not both")),
        (_, Some(k)) => Ok(Retention::Budget(k)),
        (Some(d), None) if d < 0.0 => Err(PyValueError::new_err("delta must be non-negative")),
        (d, None) => Ok(Retention::Threshold(d.unwrap_or(0.0))),
    }
}

fn prepare(m: Method, a: &DenseMatrix, rescale: bool, scaling: SFableScaling) -> fable_core::Result<PreparedEncoding> {
    match m {
        Method::Fable if rescale => PreparedEncoding::fable_rescaled(a),
        Method::Fable => PreparedEncoding::fable(a),
        Method::SFable => PreparedEncoding::sfable_dense(a, scaling),
        Method::LsFable => PreparedEncoding::lsfable(&SparseMatrix::from_dense(a)),
    }
}

/// A block-encoding circuit with its parameters and closed-form block.
#[pyclass(name = "BlockEncoding", frozen)]
struct PyBlockEncoding {
    inner: BlockEncoding,
}

#[pymethods]
impl PyBlockEncoding {
    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.as_str()
    }

    /// The circuit's top-left block is `alpha * A`.
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn ancillas(&self) -> usize {
        self.inner.ancillas
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.qubits()
    }

    /// Gate counts with SWAPs expanded into three CNOTs.
    fn gate_counts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        counts_dict(py, count_gates(&self.inner.circuit, true))
    }

    /// Closed-form approximation of `A` (block divided by `alpha`).
    fn approximation(&self) -> Vec<Vec<f64>> {
        self.inner.predicted_block.to_rows()
    }

    fn qasm(&self) -> String {
        emit_text(&self.inner.circuit)
    }

    /// Spectral-norm error against `a`.
    fn error(&self, py: Python<'_>, a: Vec<Vec<f64>>) -> PyResult<f64> {
        let a = dense(&a)?;
        py.detach(|| encoding_error(&a, &self.inner)).map_err(to_py)
    }

    /// Simulated block divided by `alpha` (n <= 6).
    fn simulate(&self, py: Python<'_>) -> PyResult<Vec<Vec<f64>>> {
        let n = self.inner.qubits();
        let block = py.detach(|| simulator::extract_block(&self.inner.circuit, n)).map_err(to_py)?;
        Ok(block.scale(1.0 / self.inner.alpha).to_rows())
    }

    fn __len__(&self) -> usize {
        self.inner.circuit.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "BlockEncoding(method={}, n={}, alpha={}, delta={}, gates={})",
            self.inner.method,
            self.inner.qubits(),
            self.inner.alpha,
            self.inner.delta,
            self.inner.circuit.len()
        )
    }
}

/// Encodes `a` with `method` ("fable", "sfable", "lsfable").
///
/// Keep angles with `|theta_hat| >= delta`, or the `budget` largest.
#[pyfunction]
#[pyo3(signature = (a, method="fable", delta=None, budget=None, rescale=false, sfable_scaling="when-needed"))]
fn encode(
    py: Python<'_>,
    a: Vec<Vec<f64>>,
    method: &str,
    delta: Option<f64>,
    budget: Option<usize>,
    rescale: bool,
    sfable_scaling: &str,
) -> PyResult<PyBlockEncoding> {
    let m = self::method(method)?;
    let scaling: SFableScaling = sfable_scaling.parse().map_err(to_py)?;
    let retention = retention(delta, budget)?;
    let a = dense(&a)?;
    let inner = py
        .detach(|| prepare(m, &a, rescale, scaling).and_then(|p| BlockEncoding::from_prepared(&p, retention)))
        .map_err(to_py)?;
    Ok(PyBlockEncoding { inner })
}

#[pyfunction]
#[pyo3(signature = (a, delta=0.0))]
fn fable_encode(py: Python<'_>, a: Vec<Vec<f64>>, delta: f64) -> PyResult<PyBlockEncoding> {
    encode(py, a, "fable", Some(delta), None, false, "when-needed")
}

#[pyfunction]
#[pyo3(signature = (a, delta=0.0))]
fn sfable_encode(py: Python<'_>, a: Vec<Vec<f64>>, delta: f64) -> PyResult<PyBlockEncoding> {
    encode(py, a, "sfable", Some(delta), None, false, "when-needed")
}

#[pyfunction]
fn lsfable_encode(py: Python<'_>, a: Vec<Vec<f64>>) -> PyResult<PyBlockEncoding> {
    encode(py, a, "lsfable", None, None, false, "when-needed")
}

/// Fewest rotations whose encoding error is below `epsilon`.
#[pyfunction]
#[pyo3(signature = (a, epsilon, method="sfable"))]
fn rotations_for_accuracy<'py>(
    py: Python<'py>,
    a: Vec<Vec<f64>>,
    epsilon: f64,
    method: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let m = self::method(method)?;
    let a = SparseMatrix::from_dense(&dense(&a)?);
    let r = py.detach(|| metrics::rotations_for_accuracy(&a, epsilon, m)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("rotations", r.rotations)?;
    d.set_item("delta", r.delta)?;
    d.set_item("epsilon", r.epsilon)?;
    d.set_item("reached", r.reached)?;
    d.set_item("gate_counts", counts_dict(py, r.counts)?)?;
    Ok(d)
}

/// Encoding error when keeping the `budget` largest angles.
#[pyfunction]
#[pyo3(signature = (a, budget, method="sfable"))]
fn error_at_budget(py: Python<'_>, a: Vec<Vec<f64>>, budget: usize, method: &str) -> PyResult<f64> {
    let m = self::method(method)?;
    let a = SparseMatrix::from_dense(&dense(&a)?);
    py.detach(|| {
        let eval = ErrorEvaluator::new(m, &a)?;
        eval.error_at(Retention::Budget(budget))
    })
    .map_err(to_py)
}

/// Seeded test matrix as a list of rows.
#[pyfunction]
#[pyo3(signature = (family, n, s=0.0, seed=0, normalize=false))]
fn generate(family: &str, n: usize, s: f64, seed: u64, normalize: bool) -> PyResult<Vec<Vec<f64>>> {
    let family: Family = family.replace('-', "_").parse().map_err(to_py)?;
    let spec = GenSpec::sparse(family, n, s, seed);
    let a = if normalize { spec.generate_for_encoding() } else { spec.generate() }.map_err(to_py)?;
    Ok(a.to_dense().to_rows())
}

/// Simulated top-left block (unscaled) of an OpenQASM-style circuit text.
#[pyfunction]
fn simulate_block(py: Python<'_>, qasm: &str) -> PyResult<Vec<Vec<f64>>> {
    let c = parse_text(qasm).map_err(to_py)?;
    if c.width() % 2 == 0 {
        return Err(PyValueError::new_err("circuit width is not 2n + 1"));
    }
    let n = (c.width() - 1) / 2;
    let block = py.detach(|| simulator::extract_block(&c, n)).map_err(to_py)?;
    Ok(block.to_rows())
}

#[pyfunction]
#[pyo3(signature = (a, tol=1e-8))]
fn spectral_norm(py: Python<'_>, a: Vec<Vec<f64>>, tol: f64) -> PyResult<f64> {
    let a = dense(&a)?;
    py.detach(|| linalg::spectral_norm(&a, tol)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (v, normalized=true))]
fn fwht(v: Vec<f64>, normalized: bool) -> PyResult<Vec<f64>> {
    linalg::fwht(&v, normalized).map_err(to_py)
}

#[pyfunction]
fn gray_code(k: usize) -> usize {
    linalg::gray_code(k)
}

/// Runs a named preset or a TOML sweep config and returns the CSV text.
#[pyfunction]
#[pyo3(signature = (preset=None, config=None, samples=None))]
fn run_sweep(py: Python<'_>, preset: Option<&str>, config: Option<&str>, samples: Option<usize>) -> PyResult<String> {
    let mut cfg = match (preset, config) {
        (Some(name), None) => metrics::preset(name).map_err(to_py)?,
        (None, Some(text)) => metrics::SweepConfig::from_toml(text).map_err(to_py)?,
        _ => return Err(PyValueError::new_err("pass exactly one of preset or config")),
    };
    if let Some(k) = samples {
        cfg.samples = k;
        cfg.samples_per_n.values_mut().for_each(|v| *v = (*v).min(k));
    }
    let outcome = py.detach(|| metrics::run_sweep(&cfg)).map_err(to_py)?;
    Ok(metrics::sweep_csv_string(&outcome.records))
}

#[pymodule]
fn pyfable(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBlockEncoding>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(fable_encode, m)?)?;
    m.add_function(wrap_pyfunction!(sfable_encode, m)?)?;
    m.add_function(wrap_pyfunction!(lsfable_encode, m)?)?;
    m.add_function(wrap_pyfunction!(rotations_for_accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(error_at_budget, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_block, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_norm, m)?)?;
    m.add_function(wrap_pyfunction!(fwht, m)?)?;
    m.add_function(wrap_pyfunction!(gray_code, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
