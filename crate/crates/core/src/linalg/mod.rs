//! Real matrix storage, Walsh–Hadamard transforms, Gray codes and norms.

mod dense;
mod fwht;
mod gray;
pub mod io;
mod norm;
mod sparse;

pub use dense::{log2_exact, DenseMatrix};
pub use fwht::{fwht, fwht_in_place, hadamard_conjugate, hadamard_conjugate_sparse};
pub use gray::{gray_code, gray_inverse, gray_table, GrayTable};
pub use norm::{
    max_abs_entry, spectral_norm, spectral_norm_with, SpectralEstimate, SpectralOptions,
    DEFAULT_MAX_ITERATIONS, POWER_ITERATION_SEED,
};
pub use sparse::SparseMatrix;
