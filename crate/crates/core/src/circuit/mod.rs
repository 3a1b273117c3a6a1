//! Gate-level circuit IR, oracle construction and assembly, text emission.

mod assemble;
mod ir;
mod oracle;
mod text;

pub use assemble::{assemble_fable, assemble_sfable};
pub use ir::{count_gates, Circuit, CircuitMeta, Gate, GateCounts, Method};
pub use oracle::{
    build_oracle, build_sparse_oracle, gray_rotation_network, oracle_controls, oracle_counts,
    oracle_from_retained,
};
pub use text::{emit_text, parse_text};
