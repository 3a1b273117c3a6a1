//! Approximate block encodings of real matrices with FABLE and its sparse
//! variants S-FABLE and LS-FABLE.
//!
//! The pipeline is: matrix → rotation angles → Walsh–Hadamard/Gray transform
//! → thresholded uniformly controlled rotation network → assembled circuit.
//! Every circuit has a closed-form [`encoders::BlockEncoding::predicted_block`]
//! which the statevector [`simulator`] can check at small sizes.

pub mod angles;
pub mod circuit;
pub mod encoders;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod simulator;

pub use circuit::{Circuit, Gate, GateCounts, Method};
pub use encoders::{
    encoding_error, fable_encode, lsfable_encode, sfable_encode, BlockEncoding,
    PreparedEncoding, Retention, SFableScaling,
};
pub use error::{FableError, Result};
pub use linalg::{DenseMatrix, SparseMatrix};
