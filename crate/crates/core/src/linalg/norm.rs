//! Matrix norms: max-entry and the spectral norm by power iteration.

use super::dense::DenseMatrix;
use crate::error::{FableError, Result};
use crate::rng::CounterRng;

/// Seed of the power-iteration start vector. Fixed so every estimate, and
/// every CSV built from estimates, is reproducible bit for bit.
pub const POWER_ITERATION_SEED: u64 = 0x5EED_FAB1_E000_0001;

pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;

/// `max_ij |m_ij|`.
pub fn max_abs_entry(m: &DenseMatrix) -> f64 {
    m.as_slice().iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    /// Lower bound on the largest singular value; within the requested
    /// relative tolerance once converged.
    pub value: f64,
    pub iterations: usize,
    /// Set when iteration stopped early because `value` already reached the
    /// caller's `stop_above` bound.
    pub exceeded: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Stop as soon as the (always lower-bound) estimate reaches this value.
    pub stop_above: Option<f64>,
}

impl SpectralOptions {
    pub fn new(tol: f64) -> Self {
        SpectralOptions {
            tol,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            stop_above: None,
        }
    }
}

/// Largest singular value of `m` to relative tolerance `tol`.
pub fn spectral_norm(m: &DenseMatrix, tol: f64) -> Result<f64> {
    spectral_norm_with(m, &SpectralOptions::new(tol)).map(|e| e.value)
}

/// Power iteration on `M^T M`.
///
/// Every iterate gives the lower bound `sqrt(|M^T M x|)` for unit `x`. The
/// loop stops when the extrapolated remaining error, estimated from the ratio
/// of successive increments, falls under `tol` relative to the estimate.
pub fn spectral_norm_with(m: &DenseMatrix, opts: &SpectralOptions) -> Result<SpectralEstimate> {
    if !(opts.tol > 0.0) {
        return Err(FableError::Config(format!(
            "spectral norm tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if max_abs_entry(m) == 0.0 {
        return Ok(SpectralEstimate {
            value: 0.0,
            iterations: 0,
            exceeded: false,
        });
    }
    let dim = m.dim();
    let mut rng = CounterRng::new(POWER_ITERATION_SEED);
    let mut x: Vec<f64> = (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect();
    normalize(&mut x);
    let mut y = vec![0.0; dim];
    let mut z = vec![0.0; dim];

    let mut estimate = 0.0;
    let mut prev_change = f64::INFINITY;
    let mut change = f64::INFINITY;
    let power_steps = opts.max_iterations.min(POWER_PHASE);
    let mut used = 0;
    for iteration in 1..=power_steps {
        used = iteration;
        m.matvec(&x, &mut y);
        m.matvec_transpose(&y, &mut z);
        let z_norm = norm2(&z);
        if z_norm == 0.0 {
            // x landed in the null space; restart from a fresh direction.
            x.iter_mut().for_each(|v| *v = rng.uniform(-1.0, 1.0));
            normalize(&mut x);
            continue;
        }
        let next = z_norm.sqrt();
        // Rayleigh quotient and residual of the current iterate.
        let rho = dot(&x, &z);
        let residual = z.iter().zip(&x).map(|(a, v)| (a - rho * v).powi(2)).sum::<f64>().sqrt();
        change = (next - estimate).abs();
        estimate = next;
        x.iter_mut().zip(&z).for_each(|(xi, zi)| *xi = zi / z_norm);

        if let Some(bound) = opts.stop_above {
            if estimate >= bound {
                return Ok(SpectralEstimate {
                    value: estimate,
                    iterations: iteration,
                    exceeded: true,
                });
            }
        }
        if iteration >= 3 {
            if change <= 4.0 * f64::EPSILON * estimate {
                // Stalled at round-off, or creeping through a near-degenerate
                // top pair; only the residual tells the two apart.
                if residual <= 0.5 * opts.tol * rho {
                    return Ok(converged(estimate, iteration));
                }
                break;
            }
            let ratio = change / prev_change;
            if ratio < 1.0 {
                let remaining = change * ratio / (1.0 - ratio);
                if remaining <= 0.5 * opts.tol * estimate {
                    return Ok(converged(estimate, iteration));
                }
            }
        }
        prev_change = change;
    }
    if opts.max_iterations > used {
        return subspace_iteration(m, x, opts, used, estimate, &mut rng);
    }
    Err(FableError::NonConvergence {
        iterations: opts.max_iterations,
        last_estimate: estimate,
        last_change: change,
        last_iterate: x,
    })
}

/// Power steps before handing over to subspace iteration. Power iteration
/// stalls when the top two singular values nearly coincide.
const POWER_PHASE: usize = 200;

/// Block size of the subspace iteration.
const BLOCK: usize = 8;

/// Subspace iteration on `M^T M` with Rayleigh-Ritz, started from the power
/// iterate plus seeded random columns. Each block step costs `BLOCK`
/// iterations of the budget. The top Ritz pair is accepted once its residual
/// `|M^T M y - rho y|` is below `tol * rho / 2`; `sqrt(rho)` is a lower bound.
fn subspace_iteration(
    m: &DenseMatrix,
    start: Vec<f64>,
    opts: &SpectralOptions,
    mut used: usize,
    floor: f64,
    rng: &mut CounterRng,
) -> Result<SpectralEstimate> {
    let dim = m.dim();
    let p = BLOCK.min(dim);
    let mut tmp = vec![0.0; dim];
    let mut apply = |v: &[f64], out: &mut [f64]| {
        m.matvec(v, &mut tmp);
        m.matvec_transpose(&tmp, out);
    };
    let mut q: Vec<Vec<f64>> = vec![start];
    while q.len() < p {
        q.push((0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect());
    }
    orthonormalize(&mut q, rng);
    let mut last = (floor, f64::INFINITY);
    loop {
        if used + p > opts.max_iterations {
            return Err(FableError::NonConvergence {
                iterations: used,
                last_estimate: last.0,
                last_change: last.1,
                last_iterate: q.swap_remove(0),
            });
        }
        used += p;
        let mut w = vec![vec![0.0; dim]; p];
        for (qi, wi) in q.iter().zip(w.iter_mut()) {
            apply(qi, wi);
        }
        let h: Vec<Vec<f64>> = (0..p).map(|i| (0..p).map(|j| dot(&q[i], &w[j])).collect()).collect();
        let (values, vectors) = symmetric_eigen(h);
        // Ritz vectors and their images, largest first.
        let combine = |basis: &[Vec<f64>], k: usize| -> Vec<f64> {
            let mut out = vec![0.0; dim];
            for (coef, b) in vectors.iter().map(|row| row[k]).zip(basis) {
                out.iter_mut().zip(b).for_each(|(o, bi)| *o += coef * bi);
            }
            out
        };
        let rho = values[0];
        let y = combine(&q, 0);
        let by = combine(&w, 0);
        let residual = by.iter().zip(&y).map(|(a, v)| (a - rho * v).powi(2)).sum::<f64>().sqrt();
        let value = rho.max(0.0).sqrt().max(floor);
        last = (value, residual);
        if let Some(bound) = opts.stop_above {
            if value >= bound {
                return Ok(SpectralEstimate {
                    value,
                    iterations: used,
                    exceeded: true,
                });
            }
        }
        if residual <= 0.5 * opts.tol * rho {
            return Ok(converged(value, used));
        }
        q = (0..p).map(|k| combine(&w, k)).collect();
        orthonormalize(&mut q, rng);
    }
}

/// Modified Gram-Schmidt, twice. Columns that vanish are replaced by
/// random ones.
fn orthonormalize(cols: &mut [Vec<f64>], rng: &mut CounterRng) {
    for k in 0..cols.len() {
        for _attempt in 0..3 {
            let before = norm2(&cols[k]);
            for _ in 0..2 {
                for j in 0..k {
                    let c = dot(&cols[j], &cols[k]);
                    let (head, tail) = cols.split_at_mut(k);
                    tail[0].iter_mut().zip(&head[j]).for_each(|(x, y)| *x -= c * y);
                }
            }
            let after = norm2(&cols[k]);
            if after > 1e-10 * before && after > 0.0 {
                normalize(&mut cols[k]);
                break;
            }
            cols[k].iter_mut().for_each(|v| *v = rng.uniform(-1.0, 1.0));
        }
    }
}

/// Eigen-decomposition of a small symmetric matrix by cyclic Jacobi.
/// Returns eigenvalues in decreasing order and the matrix whose column `k`
/// is the eigenvector of value `k`.
fn symmetric_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
    for _sweep in 0..64 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            break;
        }
        for i in 0..n {
            for j in i + 1..n {
                if a[i][j] == 0.0 {
                    continue;
                }
                let theta = (a[j][j] - a[i][i]) / (2.0 * a[i][j]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (aki, akj) = (a[k][i], a[k][j]);
                    a[k][i] = c * aki - s * akj;
                    a[k][j] = s * aki + c * akj;
                }
                for k in 0..n {
                    let (aik, ajk) = (a[i][k], a[j][k]);
                    a[i][k] = c * aik - s * ajk;
                    a[j][k] = s * aik + c * ajk;
                }
                for row in v.iter_mut() {
                    let (vi, vj) = (row[i], row[j]);
                    row[i] = c * vi - s * vj;
                    row[j] = s * vi + c * vj;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let values = order.iter().map(|&k| a[k][k]).collect();
    let vectors = (0..n).map(|i| order.iter().map(|&k| v[i][k]).collect()).collect();
    (values, vectors)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn converged(value: f64, iterations: usize) -> SpectralEstimate {
    SpectralEstimate {
        value,
        iterations,
        exceeded: false,
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    v.iter_mut().for_each(|x| *x /= n);
}
