#![allow(dead_code)]

use fable_core::rng::CounterRng;
use fable_core::{DenseMatrix, SparseMatrix};

pub fn random_dense(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = CounterRng::new(seed);
    DenseMatrix::from_fn(n, |_, _| rng.uniform(-1.0, 1.0))
}

/// Random sparse matrix with roughly `fill` of the cells set.
pub fn random_sparse(n: usize, fill: f64, seed: u64) -> SparseMatrix {
    let mut rng = CounterRng::new(seed);
    let dim = 1usize << n;
    let mut entries = Vec::new();
    for r in 0..dim {
        for c in 0..dim {
            if rng.next_f64() < fill {
                let v = rng.uniform(-1.0, 1.0);
                if v != 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
    }
    if entries.is_empty() {
        entries.push((0, dim - 1, 0.5));
    }
    SparseMatrix::new(n, entries).unwrap()
}

/// Random orthogonal matrix as a product of Householder reflections.
pub fn random_orthogonal(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = CounterRng::new(seed);
    let mut q = DenseMatrix::identity(n);
    for _ in 0..3 {
        let v: Vec<f64> = (0..q.dim()).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let h = DenseMatrix::from_fn(n, |i, j| (i == j) as u8 as f64 - 2.0 * v[i] * v[j] / vv);
        q = h.matmul(&q).unwrap();
    }
    q
}

pub fn max_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.max_abs_diff(b).unwrap()
}
