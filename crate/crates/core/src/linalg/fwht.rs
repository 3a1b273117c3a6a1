//! Fast Walsh–Hadamard transforms.

use std::f64::consts::FRAC_1_SQRT_2;

use super::dense::DenseMatrix;
use super::sparse::SparseMatrix;
use crate::error::{FableError, Result};

/// In-place Walsh–Hadamard transform of a power-of-two length slice.
///
/// With `normalized`, the result carries the factor `2^{-m/2}` (one `1/sqrt(2)`
/// per butterfly stage, applied once at the end so even `m` scales exactly), making
/// the transform orthonormal and its own inverse. Otherwise the result is the
/// unscaled `+-1` transform.
pub fn fwht_in_place(v: &mut [f64], normalized: bool) -> Result<()> {
    if !v.len().is_power_of_two() {
        return Err(FableError::Dimension(format!(
            "Walsh-Hadamard transform length {} is not a power of two",
            v.len()
        )));
    }
    let mut half = 1;
    while half < v.len() {
        for block in v.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
    if normalized {
        let scale = normalization(v.len().trailing_zeros());
        v.iter_mut().for_each(|x| *x *= scale);
    }
    Ok(())
}

/// `2^{-m/2}`, exact for even `m`.
fn normalization(m: u32) -> f64 {
    let even = 0.5f64.powi((m / 2) as i32);
    if m % 2 == 1 {
        even * FRAC_1_SQRT_2
    } else {
        even
    }
}

/// Returns `H^{⊗m} v` for `v` of length `2^m`.
pub fn fwht(v: &[f64], normalized: bool) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    fwht_in_place(&mut out, normalized)?;
    Ok(out)
}

/// Unscaled butterflies between whole rows of a row-major square matrix,
/// i.e. the `+-1` transform applied column-wise without transposing.
fn fwht_columns(data: &mut [f64], dim: usize) {
    let mut half = 1;
    while half < dim {
        for block in data.chunks_exact_mut(2 * half * dim) {
            let (lo, hi) = block.split_at_mut(half * dim);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
}

/// `H^{⊗n} A H^{⊗n}` with the orthonormal Hadamard, in `O(N^2 log N)`.
/// Both sides are transformed unscaled and the combined `1/N` applied once.
pub fn hadamard_conjugate(a: &DenseMatrix) -> DenseMatrix {
    let dim = a.dim();
    let mut out = a.clone();
    let data = out.as_mut_slice();
    for row in data.chunks_exact_mut(dim) {
        fwht_in_place(row, false).expect("row length is a power of two");
    }
    fwht_columns(data, dim);
    let scale = 1.0 / dim as f64;
    data.iter_mut().for_each(|x| *x *= scale);
    out
}

pub fn hadamard_conjugate_sparse(a: &SparseMatrix) -> DenseMatrix {
    hadamard_conjugate(&a.to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_ones_maps_to_scaled_basis_vector() {
        let out = fwht(&[1.0; 4], true).unwrap();
        assert_eq!(out, vec![2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn single_hadamard_column() {
        let out = fwht(&[1.0, 0.0], true).unwrap();
        assert!((out[0] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out[1] - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_matches_sign_matrix() {
        let v: Vec<f64> = (0..8).map(|k| (k as f64).sin()).collect();
        let out = fwht(&v, false).unwrap();
        for (i, o) in out.iter().enumerate() {
            let expected: f64 = v
                .iter()
                .enumerate()
                .map(|(j, x)| if (i & j).count_ones() % 2 == 0 { *x } else { -*x })
                .sum();
            assert!((o - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(
            fwht(&[1.0, 2.0, 3.0], true),
            Err(FableError::Dimension(_))
        ));
    }

    #[test]
    fn identity_is_fixed_by_conjugation() {
        for n in 0..5 {
            let id = DenseMatrix::identity(n);
            assert!(hadamard_conjugate(&id).max_abs_diff(&id).unwrap() < 1e-14);
        }
    }

    #[test]
    fn scaled_corner_maps_to_all_ones() {
        let n = 3;
        let mut a = DenseMatrix::zeros(n);
        a.set(0, 0, 8.0);
        let b = hadamard_conjugate(&a);
        assert!(b.as_slice().iter().all(|v| (v - 1.0).abs() < 1e-13));
    }

    #[test]
    fn column_butterflies_match_transpose_route() {
        let a = DenseMatrix::from_fn(3, |i, j| ((i * 7 + j * 3) as f64).cos());
        // H A H = ((A H)^T H)^T since H is symmetric.
        let mut rows = a.clone();
        for r in rows.as_mut_slice().chunks_exact_mut(8) {
            fwht_in_place(r, true).unwrap();
        }
        let mut t = rows.transpose();
        for r in t.as_mut_slice().chunks_exact_mut(8) {
            fwht_in_place(r, true).unwrap();
        }
        let expected = t.transpose();
        assert!(hadamard_conjugate(&a).max_abs_diff(&expected).unwrap() < 1e-13);
    }

    proptest! {
        #[test]
        fn normalized_transform_is_involutory(v in prop::collection::vec(-10.0f64..10.0, 64)) {
            let back = fwht(&fwht(&v, true).unwrap(), true).unwrap();
            for (a, b) in v.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn conjugation_is_involutory_and_preserves_frobenius(
            data in prop::collection::vec(-1.0f64..1.0, 64)
        ) {
            let a = DenseMatrix::from_vec(3, data).unwrap();
            let b = hadamard_conjugate(&a);
            prop_assert!((a.frobenius_norm() - b.frobenius_norm()).abs() < 1e-12);
            prop_assert!(hadamard_conjugate(&b).max_abs_diff(&a).unwrap() < 1e-12);
        }
    }
}
