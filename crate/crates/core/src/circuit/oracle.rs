//! Gray-code uniformly controlled `R_y` network with threshold elimination.
//!
//! In the uncompressed network the rotation at Gray position `k` is followed
//! by a CNOT on the bit flipped between `g_k` and `g_{k+1}` (cyclically, so the
//! last CNOT returns to code 0). Dropping rotations leaves runs of CNOTs with a
//! common target; they commute, and a run between retained positions `p < q`
//! reduces to one CNOT per set bit of `g_p XOR g_q`.

use super::ir::{Circuit, Gate};
use crate::angles::AngleSet;
use crate::linalg::gray_code;

/// Emits the compressed network for the retained `(gray_position, angle)`
/// entries, which must be sorted by position.
///
/// `control_of_bit[b]` is the qubit carrying bit `b` of the control index.
/// Each rotation is emitted as `R_y(2 * angle)` so the target picks up
/// `cos(theta)` when the accumulated angle is `theta`.
pub fn gray_rotation_network(
    width: usize,
    target: usize,
    control_of_bit: &[usize],
    retained: &[(usize, f64)],
) -> Circuit {
    let mut c = Circuit::new(width);
    let flush = |c: &mut Circuit, mut mask: usize| {
        while mask != 0 {
            let bit = mask.trailing_zeros() as usize;
            c.push_unchecked(Gate::Cnot {
                control: control_of_bit[bit],
                target,
            });
            mask &= mask - 1;
        }
    };
    let mut code = 0;
    let mut last = None;
    for &(pos, angle) in retained {
        debug_assert!(last.is_none_or(|l| l < pos), "positions must increase");
        last = Some(pos);
        let next = gray_code(pos);
        flush(&mut c, code ^ next);
        code = next;
        c.push_unchecked(Gate::Ry {
            target,
            angle: 2.0 * angle,
        });
    }
    flush(&mut c, code);
    c
}

/// Control qubit for bit `b` of the linear index `l = i * N + j`.
pub fn oracle_controls(n: usize) -> Vec<usize> {
    (0..2 * n).map(|b| 2 * n - b).collect()
}

/// Oracle on `2n + 1` qubits carrying the retained entries.
pub fn oracle_from_retained(n: usize, retained: &[(usize, f64)]) -> Circuit {
    gray_rotation_network(2 * n + 1, 0, &oracle_controls(n), retained)
}

/// Oracle keeping every position with `|theta_hat| >= delta`. At `delta = 0`
/// this is the full network: all `N^2` rotations (zero angles included) and
/// `N^2` CNOTs.
pub fn build_oracle(angles: &AngleSet, delta: f64) -> Circuit {
    let n = angles.qubits();
    let retained = if delta <= 0.0 {
        let mut dense: Vec<(usize, f64)> = (0..angles.len()).map(|p| (p, 0.0)).collect();
        for (p, v) in angles.entries() {
            dense[p].1 = v;
        }
        dense
    } else {
        angles.retained_by_threshold(delta)
    };
    let mut c = oracle_from_retained(n, &retained);
    c.meta.delta = delta.max(0.0);
    c
}

/// Oracle over the nonzero angles only.
pub fn build_sparse_oracle(angles: &AngleSet) -> Circuit {
    let retained: Vec<_> = angles.entries().collect();
    oracle_from_retained(angles.qubits(), &retained)
}

/// `(rotations, cnots)` of the compressed oracle for sorted retained
/// positions, without materialising the gates.
pub fn oracle_counts(positions: impl IntoIterator<Item = usize>) -> (usize, usize) {
    let mut code = 0usize;
    let (mut rotations, mut cnots) = (0, 0);
    for pos in positions {
        let next = gray_code(pos);
        cnots += (code ^ next).count_ones() as usize;
        code = next;
        rotations += 1;
    }
    (rotations, cnots + code.count_ones() as usize)
}
