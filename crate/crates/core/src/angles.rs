//! Raw rotation angles, the Gray-permuted Walsh–Hadamard angle transform and
//! closed-form evaluation of the block a (compressed) oracle encodes.
//!
//! Angle vectors are indexed two ways. The *linear* index of entry `(i, j)` is
//! `l = i * N + j` (row-major, matching the row register holding `i` above the
//! column register holding `j`). The *Gray position* `k` is the step of the
//! oracle at which a rotation is applied; position `k` corresponds to linear
//! index `gray_code(k)`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{FableError, Result};
use crate::linalg::{fwht_in_place, gray_code, gray_inverse, DenseMatrix, SparseMatrix};

/// Entries this far outside `[-1, 1]` are clamped instead of rejected.
pub const CLAMP_SLACK: f64 = 1e-12;

/// Transformed angles below this magnitude are stored as exact zeros.
pub const SNAP_TO_ZERO: f64 = 1e-15;

/// Largest supported qubit count; Gray positions are stored as `u32`.
pub const MAX_QUBITS: usize = 15;

/// `theta_ij = arccos(a_ij)`, each in `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAngles {
    pub theta: DenseMatrix,
}

impl RawAngles {
    pub fn qubits(&self) -> usize {
        self.theta.qubits()
    }
}

pub fn angles_of(a: &DenseMatrix) -> Result<RawAngles> {
    let dim = a.dim();
    let mut theta = Vec::with_capacity(dim * dim);
    for (k, &v) in a.as_slice().iter().enumerate() {
        if v.abs() > 1.0 + CLAMP_SLACK {
            return Err(FableError::Domain {
                row: k / dim,
                col: k % dim,
                value: v,
            });
        }
        theta.push(v.clamp(-1.0, 1.0).acos());
    }
    Ok(RawAngles {
        theta: DenseMatrix::from_vec(a.qubits(), theta)?,
    })
}

/// Transformed angles in Gray order, stored sparsely.
///
/// Only nonzero angles are kept; every absent position is exactly zero.
/// `order` lists stored entries by descending magnitude, ties broken by the
/// lower Gray position.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSet {
    n: usize,
    positions: Vec<u32>,
    values: Vec<f64>,
    order: Vec<u32>,
}

impl AngleSet {
    /// Builds a set from `(gray_position, value)` pairs; repeated positions are summed.
    pub fn from_entries(n: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        check_qubits(n)?;
        let len = 1usize << (2 * n);
        if let Some(&(p, _)) = entries.iter().find(|e| e.0 >= len) {
            return Err(FableError::Dimension(format!(
                "Gray position {p} outside 0..{len}"
            )));
        }
        entries.sort_by_key(|e| e.0);
        let mut positions = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        for (p, v) in entries {
            if positions.last() == Some(&(p as u32)) {
                *values.last_mut().unwrap() += v;
            } else {
                positions.push(p as u32);
                values.push(v);
            }
        }
        let (positions, values) = positions
            .into_iter()
            .zip(values)
            .filter(|(_, v)| v.abs() >= SNAP_TO_ZERO)
            .unzip();
        Ok(Self::with_sorted(n, positions, values))
    }

    /// Builds a set from a dense vector indexed by Gray position.
    pub fn from_dense(n: usize, values: &[f64]) -> Result<Self> {
        check_qubits(n)?;
        if values.len() != 1usize << (2 * n) {
            return Err(FableError::Dimension(format!(
                "angle vector has length {}, expected {}",
                values.len(),
                1usize << (2 * n)
            )));
        }
        let (positions, vals) = values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() >= SNAP_TO_ZERO)
            .map(|(k, &v)| (k as u32, v))
            .unzip();
        Ok(Self::with_sorted(n, positions, vals))
    }

    fn with_sorted(n: usize, positions: Vec<u32>, values: Vec<f64>) -> Self {
        let mut order: Vec<u32> = (0..positions.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            values[b as usize]
                .abs()
                .total_cmp(&values[a as usize].abs())
                .then(positions[a as usize].cmp(&positions[b as usize]))
        });
        AngleSet {
            n,
            positions,
            values,
            order,
        }
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Number of Gray positions, `N^2`.
    pub fn len(&self) -> usize {
        1 << (2 * self.n)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of nonzero transformed angles.
    pub fn nnz(&self) -> usize {
        self.positions.len()
    }

    pub fn get(&self, position: usize) -> f64 {
        match self.positions.binary_search(&(position as u32)) {
            Ok(i) => self.values[i],
            Err(_) => 0.0,
        }
    }

    /// Nonzero `(position, value)` pairs in Gray order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.positions
            .iter()
            .zip(&self.values)
            .map(|(&p, &v)| (p as usize, v))
    }

    /// Dense vector indexed by Gray position.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (p, v) in self.entries() {
            out[p] = v;
        }
        out
    }

    /// Nonzero entries by descending magnitude (ties: lower position first).
    pub fn by_magnitude(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.order.iter().map(|&i| {
            let i = i as usize;
            (self.positions[i] as usize, self.values[i])
        })
    }

    /// Every position `0..N^2` by non-increasing magnitude; the zero
    /// positions follow the nonzero ones in ascending order.
    pub fn full_order(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.by_magnitude().map(|(p, _)| p).collect();
        let mut stored = self.positions.iter().peekable();
        for p in 0..self.len() {
            if stored.peek() == Some(&&(p as u32)) {
                stored.next();
            } else {
                out.push(p);
            }
        }
        out
    }

    /// Magnitudes in descending order.
    pub fn magnitudes_desc(&self) -> Vec<f64> {
        self.by_magnitude().map(|(_, v)| v.abs()).collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.by_magnitude().next().map_or(0.0, |(_, v)| v.abs())
    }

    /// Entries with `|value| >= delta`, in Gray order.
    pub fn retained_by_threshold(&self, delta: f64) -> Vec<(usize, f64)> {
        self.entries().filter(|(_, v)| v.abs() >= delta).collect()
    }

    /// The `budget` largest-magnitude entries, in Gray order.
    pub fn retained_top(&self, budget: usize) -> Vec<(usize, f64)> {
        let mut kept: Vec<(usize, f64)> = self.by_magnitude().take(budget).collect();
        kept.sort_unstable_by_key(|e| e.0);
        kept
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(FableError::Resource(format!(
            "{n} qubits exceeds the supported maximum of {MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// `vec(theta_hat) = P_G^{-1} (1/N) H^{⊗2n} vec(theta)`, in `O(N^2 log N)`.
pub fn transform_angles(raw: &RawAngles) -> Result<AngleSet> {
    let n = raw.qubits();
    check_qubits(n)?;
    let mut w = raw.theta.as_slice().to_vec();
    fwht_in_place(&mut w, false)?;
    let scale = 1.0 / w.len() as f64;
    let values: Vec<f64> = (0..w.len()).map(|k| w[gray_code(k)] * scale).collect();
    AngleSet::from_dense(n, &values)
}

/// Forward map `vec(theta) = N H^{⊗2n} P_G vec(theta_hat)` restricted to the
/// given `(gray_position, value)` entries; returned in linear order.
pub fn raw_from_entries(n: usize, entries: &[(usize, f64)]) -> Vec<f64> {
    let mut linear = vec![0.0; 1usize << (2 * n)];
    for &(p, v) in entries {
        linear[gray_code(p)] += v;
    }
    fwht_in_place(&mut linear, false).expect("length is a power of two");
    linear
}

/// Entrywise cosine of the forward map of `entries`, reshaped to `N x N`.
///
/// This is `2^n` times the block encoded by an oracle carrying exactly
/// these rotations inside the FABLE wrapper.
pub fn effective_block_from(n: usize, entries: &[(usize, f64)]) -> DenseMatrix {
    let mut theta = raw_from_entries(n, entries);
    theta.iter_mut().for_each(|t| *t = t.cos());
    DenseMatrix::from_vec(n, theta).expect("cosines are finite")
}

/// Closed-form block after dropping every angle with `|theta_hat| < delta`.
pub fn effective_block(angles: &AngleSet, delta: f64) -> DenseMatrix {
    effective_block_from(angles.qubits(), &angles.retained_by_threshold(delta))
}

/// Closed-form block keeping only the `budget` largest angles.
pub fn effective_block_top(angles: &AngleSet, budget: usize) -> DenseMatrix {
    effective_block_from(angles.qubits(), &angles.retained_top(budget))
}

/// First-order angles `theta_hat = (pi/2) E_00 - A / N`, placed at the Gray
/// position of each entry's linear index.
pub fn ls_angles(a: &SparseMatrix) -> Result<AngleSet> {
    let n = a.qubits();
    let inv_dim = 1.0 / a.dim() as f64;
    let mut entries = Vec::with_capacity(a.nnz() + 1);
    entries.push((0, FRAC_PI_2));
    for &(r, c, v) in a.entries() {
        entries.push((gray_inverse(r * a.dim() + c), -v * inv_dim));
    }
    AngleSet::from_entries(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hadamard_conjugate, spectral_norm, DenseMatrix};
    use crate::rng::CounterRng;
    use std::f64::consts::PI;

    fn random_dense(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = CounterRng::new(seed);
        DenseMatrix::from_fn(n, |_, _| rng.uniform(-1.0, 1.0))
    }

    fn random_sparse(n: usize, count: usize, seed: u64) -> SparseMatrix {
        let mut rng = CounterRng::new(seed);
        let dim = 1 << n;
        let mut cells = std::collections::BTreeMap::new();
        while cells.len() < count {
            let r = rng.below(dim as u64) as usize;
            let c = rng.below(dim as u64) as usize;
            cells.insert((r, c), rng.uniform(-1.0, 1.0));
        }
        SparseMatrix::new(n, cells.into_iter().map(|((r, c), v)| (r, c, v)).collect()).unwrap()
    }

    /// Sign-matrix oracle: theta_b = sum_k (-1)^{b . g_k} theta_hat_k.
    fn brute_forward(n: usize, dense_hat: &[f64]) -> Vec<f64> {
        let len = 1 << (2 * n);
        (0..len)
            .map(|b| {
                (0..len)
                    .map(|k| {
                        let sign = if (b & gray_code(k)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        sign * dense_hat[k]
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn special_entries() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![-1.0, 1.0 + 1e-13]]).unwrap();
        let raw = angles_of(&a).unwrap();
        assert_eq!(raw.theta.get(0, 0), 0.0);
        assert!((raw.theta.get(0, 1) - PI / 2.0).abs() < 1e-15);
        assert!((raw.theta.get(1, 0) - PI).abs() < 1e-15);
        assert_eq!(raw.theta.get(1, 1), 0.0);
    }

    #[test]
    fn out_of_range_entry_is_named() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 0.0], vec![1.5, 0.0]]).unwrap();
        match angles_of(&a) {
            Err(FableError::Domain { row, col, value }) => {
                assert_eq!((row, col, value), (1, 0, 1.5));
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn constant_angles_collapse() {
        let c = 0.37;
        let raw = RawAngles {
            theta: DenseMatrix::from_fn(1, |_, _| c),
        };
        let set = transform_angles(&raw).unwrap();
        assert_eq!(set.nnz(), 1);
        assert!((set.get(0) - c).abs() < 1e-15);
    }

    #[test]
    fn zero_raw_angles() {
        let raw = RawAngles {
            theta: DenseMatrix::zeros(2),
        };
        assert_eq!(transform_angles(&raw).unwrap().nnz(), 0);
    }

    #[test]
    fn transform_matches_sign_matrix_oracle() {
        for n in 1..=2 {
            let raw = angles_of(&random_dense(n, 11 + n as u64)).unwrap();
            let set = transform_angles(&raw).unwrap();
            let back = brute_forward(n, &set.to_dense());
            for (a, b) in back.iter().zip(raw.theta.as_slice()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn forward_map_inverts_transform() {
        for n in 1..=6 {
            let raw = angles_of(&random_dense(n, 100 + n as u64)).unwrap();
            let set = transform_angles(&raw).unwrap();
            let entries: Vec<_> = set.entries().collect();
            let back = raw_from_entries(n, &entries);
            let err = back
                .iter()
                .zip(raw.theta.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "n={n}: {err}");
        }
    }

    #[test]
    fn exact_at_zero_threshold() {
        let a = random_dense(3, 5);
        let set = transform_angles(&angles_of(&a).unwrap()).unwrap();
        assert!(effective_block(&set, 0.0).max_abs_diff(&a).unwrap() < 1e-12);
    }

    #[test]
    fn empty_oracle_gives_all_ones() {
        let a = random_dense(2, 6);
        let set = transform_angles(&angles_of(&a).unwrap()).unwrap();
        let block = effective_block(&set, set.max_magnitude() * 1.01);
        assert!(block.as_slice().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn order_is_by_descending_magnitude() {
        let set = AngleSet::from_entries(1, vec![(3, -0.5), (1, 0.5), (2, 0.1), (0, 0.9)]).unwrap();
        let order: Vec<usize> = set.by_magnitude().map(|e| e.0).collect();
        assert_eq!(order, vec![0, 1, 3, 2]);
        assert_eq!(set.full_order(), vec![0, 1, 3, 2]);
        assert_eq!(set.retained_top(2), vec![(0, 0.9), (1, 0.5)]);
    }

    #[test]
    fn ls_angles_of_zero_matrix() {
        let set = ls_angles(&SparseMatrix::zeros(2)).unwrap();
        assert_eq!(set.entries().collect::<Vec<_>>(), vec![(0, FRAC_PI_2)]);
    }

    #[test]
    fn ls_angles_merge_corner() {
        let n = 2;
        let a = SparseMatrix::new(n, vec![(0, 0, 4.0)]).unwrap();
        let set = ls_angles(&a).unwrap();
        assert_eq!(set.nnz(), 1);
        assert!((set.get(0) - (FRAC_PI_2 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn ls_effective_block_is_sine_of_conjugate() {
        let n = 3;
        let a = random_sparse(n, 20, 77);
        let set = ls_angles(&a).unwrap();
        assert!(set.nnz() <= a.nnz() + 1);
        let block = effective_block(&set, 0.0);
        let expected = hadamard_conjugate(&a.to_dense()).map(f64::sin);
        assert!(block.max_abs_diff(&expected).unwrap() < 1e-12);
        let mapped = hadamard_conjugate(&block);
        let oracle = hadamard_conjugate(&expected);
        assert!(mapped.max_abs_diff(&oracle).unwrap() < 1e-12);
    }

    #[test]
    fn threshold_error_within_worst_case_bound() {
        for n in 1..=5 {
            let a = random_dense(n, 900 + n as u64);
            let set = transform_angles(&angles_of(&a).unwrap()).unwrap();
            let mags = set.magnitudes_desc();
            let dim = (1usize << n) as f64;
            for q in [0.9, 0.5, 0.1] {
                let delta = mags[((mags.len() - 1) as f64 * q) as usize];
                let approx = effective_block(&set, delta);
                assert!(approx.as_slice().iter().all(|v| v.abs() <= 1.0));
                let err = spectral_norm(&a.sub(&approx).unwrap(), 1e-8).unwrap();
                assert!(err <= dim.powi(3) * delta, "n={n} q={q}");
            }
        }
    }
}
