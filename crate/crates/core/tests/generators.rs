//! Invariants of the matrix generators.

use fable_core::generators::*;
use fable_core::linalg::{io, DenseMatrix};
use fable_core::rng::CounterRng;
use proptest::prelude::*;

fn quadratic_form(m: &DenseMatrix, x: &[f64]) -> f64 {
    let mut y = vec![0.0; x.len()];
    m.matvec(x, &mut y);
    x.iter().zip(&y).map(|(a, b)| a * b).sum()
}

#[test]
fn open_laplacian_is_positive_semidefinite() {
    for (nx, ny) in [(1, 1), (2, 1), (2, 3), (3, 3)] {
        let l = gen_laplacian2d(nx, ny, false).unwrap();
        assert_eq!(l, l.transpose());
        // Gershgorin: each diagonal 4 dominates its off-diagonal row sum.
        for i in 0..l.dim() {
            let off: f64 = (0..l.dim()).filter(|&j| j != i).map(|j| l.get(i, j).abs()).sum();
            assert!(l.get(i, i) >= off);
        }
        let mut rng = CounterRng::new(nx as u64 * 7 + ny as u64);
        for _ in 0..20 {
            let x: Vec<f64> = (0..l.dim()).map(|_| rng.uniform(-1.0, 1.0)).collect();
            assert!(quadratic_form(&l, &x) >= -1e-12);
        }
    }
}

#[test]
fn heisenberg_xyz_spec_is_symmetric_and_sparse() {
    let spec = GenSpec {
        random_couplings: true,
        seed: 12,
        ..GenSpec::new(Family::Heisenberg, 6)
    };
    let h = spec.generate().unwrap();
    let d = h.to_dense();
    assert_eq!(d, d.transpose());
    // At most one diagonal entry plus one flip per bond in each row.
    assert!(h.relative_sparsity() <= 6.0);
}

#[test]
fn generated_matrices_survive_matrix_market() {
    let a = gen_uniform_sparse(5, 3.0, 4).unwrap();
    let text = io::write_matrix_market_string(&a, &["seed 4".to_string()]);
    assert_eq!(io::parse_matrix_market(&text).unwrap(), a);
}

#[test]
fn thresholded_positive_matches_target_density() {
    let a = gen_thresholded_positive(8, 15.06 / 256.0, 0.7, 1).unwrap();
    let s = a.relative_sparsity();
    assert!((s - 15.06).abs() < 1.5, "s = {s}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sparse_generators_hit_exact_counts(n in 1usize..=7, s in 0.5f64..6.0, seed in any::<u64>()) {
        let dim = 1usize << n;
        let expected = (s * dim as f64).round() as usize;
        prop_assume!(expected >= 1 && expected <= dim * dim);
        for gen in [gen_uniform_sparse, gen_binary_sparse, gen_nonneg_sparse] {
            let a = gen(n, s, seed).unwrap();
            prop_assert_eq!(a.nnz(), expected);
            prop_assert_eq!(gen(n, s, seed).unwrap(), a);
        }
    }

    #[test]
    fn heisenberg_is_symmetric(n in 2usize..=6, j in prop::array::uniform4(-1.0f64..1.0)) {
        let h = gen_heisenberg(n, j[0], j[1], j[2], j[3]).unwrap();
        prop_assert_eq!(h.transpose(), h);
    }
}
