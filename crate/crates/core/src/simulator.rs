//! Dense real statevector simulation and block extraction.
//!
//! Qubit `q` of a `w`-qubit register is bit `w - 1 - q` of the basis index, so
//! the basis state `|a>|i>|j>` of a `(1 + n + n)`-qubit circuit has index
//! `a * N^2 + i * N + j`.

use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;

use crate::angles::angles_of;
use crate::circuit::{Circuit, Gate};
use crate::error::{FableError, Result};
use crate::linalg::DenseMatrix;

/// Largest `n` (so `2n + 1` qubits) simulated by default.
pub const MAX_SIMULATED_QUBITS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amplitudes: Vec<f64>,
}

impl StateVector {
    pub fn basis(width: usize, index: usize) -> Self {
        let mut amplitudes = vec![0.0; 1 << width];
        amplitudes[index] = 1.0;
        StateVector { width, amplitudes }
    }

    pub fn zero(width: usize) -> Self {
        Self::basis(width, 0)
    }

    pub fn from_amplitudes(width: usize, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != 1 << width {
            return Err(FableError::Dimension(format!(
                "{} amplitudes for {width} qubits",
                amplitudes.len()
            )));
        }
        Ok(StateVector { width, amplitudes })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }

    fn apply_gate(&mut self, gate: &Gate) {
        let w = self.width;
        let bit = |q: usize| 1usize << (w - 1 - q);
        let amps = &mut self.amplitudes;
        match *gate {
            Gate::Ry { target, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                pair_update(amps, bit(target), |a0, a1| (c * a0 - s * a1, s * a0 + c * a1));
            }
            Gate::H { target } => {
                pair_update(amps, bit(target), |a0, a1| {
                    ((a0 + a1) * FRAC_1_SQRT_2, (a0 - a1) * FRAC_1_SQRT_2)
                });
            }
            Gate::Cnot { control, target } => {
                let (cb, tb) = (bit(control), bit(target));
                for i in 0..amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        amps.swap(i, i | tb);
                    }
                }
            }
            Gate::Swap { a, b } => {
                let (ab, bb) = (bit(a), bit(b));
                for i in 0..amps.len() {
                    if i & ab != 0 && i & bb == 0 {
                        amps.swap(i, (i & !ab) | bb);
                    }
                }
            }
        }
    }
}

fn pair_update(amps: &mut [f64], stride: usize, f: impl Fn(f64, f64) -> (f64, f64)) {
    for block in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = f(*a0, *a1);
            *a0 = x;
            *a1 = y;
        }
    }
}

pub fn apply_in_place(c: &Circuit, psi: &mut StateVector) -> Result<()> {
    if c.width() != psi.width {
        return Err(FableError::WidthMismatch {
            expected: c.width(),
            found: psi.width,
        });
    }
    for g in c.gates() {
        psi.apply_gate(g);
    }
    Ok(())
}

pub fn apply(c: &Circuit, psi: &StateVector) -> Result<StateVector> {
    let mut out = psi.clone();
    apply_in_place(c, &mut out)?;
    Ok(out)
}

/// `Ã_ij = <0|<0^n|<i| U |0>|0^n>|j>` with the default size guard.
pub fn extract_block(c: &Circuit, n: usize) -> Result<DenseMatrix> {
    extract_block_with_limit(c, n, MAX_SIMULATED_QUBITS)
}

pub fn extract_block_with_limit(c: &Circuit, n: usize, max_n: usize) -> Result<DenseMatrix> {
    if n > max_n {
        return Err(FableError::Resource(format!(
            "simulating n = {n} ({} qubits) exceeds the limit n <= {max_n}; use the closed-form block",
            2 * n + 1
        )));
    }
    if c.width() != 2 * n + 1 {
        return Err(FableError::WidthMismatch {
            expected: 2 * n + 1,
            found: c.width(),
        });
    }
    let dim = 1usize << n;
    let columns: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut psi = StateVector::basis(c.width(), j);
            apply_in_place(c, &mut psi).expect("width checked");
            psi.amplitudes[..dim].to_vec()
        })
        .collect();
    Ok(DenseMatrix::from_fn(n, |i, j| columns[j][i]))
}

/// Full real unitary of `c`, column by column (row-major result).
pub fn circuit_unitary(c: &Circuit) -> Result<DenseMatrix> {
    if c.width() > 2 * MAX_SIMULATED_QUBITS + 1 {
        return Err(FableError::Resource(format!(
            "{} qubits is too wide for an explicit unitary",
            c.width()
        )));
    }
    let dim = 1usize << c.width();
    let columns: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut psi = StateVector::basis(c.width(), j);
            apply_in_place(c, &mut psi).expect("width matches");
            psi.amplitudes
        })
        .collect();
    Ok(DenseMatrix::from_fn(c.width(), |i, j| columns[j][i]))
}

/// Probability of measuring every ancilla in `|0>` after running `c` on
/// `|0>|0^n>|psi>`.
pub fn success_probability(c: &Circuit, n: usize, psi: &[f64]) -> Result<f64> {
    let dim = 1usize << n;
    if psi.len() != dim {
        return Err(FableError::Dimension(format!(
            "data state has {} amplitudes, expected {dim}",
            psi.len()
        )));
    }
    let mut amps = vec![0.0; 1 << c.width()];
    amps[..dim].copy_from_slice(psi);
    let mut state = StateVector::from_amplitudes(c.width(), amps)?;
    apply_in_place(c, &mut state)?;
    Ok(state.amplitudes[..dim].iter().map(|a| a * a).sum())
}

/// Largest `n` accepted by [`naive_oracle_block`].
pub const MAX_NAIVE_QUBITS: usize = 3;

/// Block of the FABLE wrapper around an oracle built from explicit
/// multi-controlled rotations, one per matrix entry, multiplied out as dense
/// `2^{2n+1}`-dimensional matrices.
///
/// Shares nothing with the Gray-code path beyond `arccos`, which makes it a
/// cross-check for the oracle builder.
pub fn naive_oracle_block(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.qubits();
    if n > MAX_NAIVE_QUBITS {
        return Err(FableError::Resource(format!(
            "naive oracle limited to n <= {MAX_NAIVE_QUBITS}, got {n}"
        )));
    }
    let theta = angles_of(a)?.theta;
    let width = 2 * n + 1;
    let dim = 1usize << n;
    let half = dim * dim;

    let mut oracle = DenseMatrix::identity(width);
    for l in 0..half {
        let (s, c) = theta.as_slice()[l].sin_cos();
        // R_y(2 theta_l) on the ancilla, controlled on the registers holding l.
        let mut rot = DenseMatrix::identity(width);
        rot.set(l, l, c);
        rot.set(half + l, l, s);
        rot.set(l, half + l, -s);
        rot.set(half + l, half + l, c);
        oracle = rot.matmul(&oracle)?;
    }

    let inv_sqrt = 1.0 / (dim as f64).sqrt();
    let split = |x: usize| (x / half, (x / dim) % dim, x % dim);
    let hadamard_rows = DenseMatrix::from_fn(width, |x, y| {
        let ((a1, r1, d1), (a2, r2, d2)) = (split(x), split(y));
        if a1 != a2 || d1 != d2 {
            0.0
        } else if (r1 & r2).count_ones() % 2 == 0 {
            inv_sqrt
        } else {
            -inv_sqrt
        }
    });
    let swap = DenseMatrix::from_fn(width, |x, y| {
        let ((a1, r1, d1), (a2, r2, d2)) = (split(x), split(y));
        if a1 == a2 && r1 == d2 && d1 == r2 {
            1.0
        } else {
            0.0
        }
    });
    let u = hadamard_rows
        .matmul(&swap)?
        .matmul(&oracle)?
        .matmul(&hadamard_rows)?;
    Ok(DenseMatrix::from_fn(n, |i, j| u.get(i, j)))
}
