//! Wrappers turning an oracle into a full block-encoding circuit.

use super::ir::{Circuit, Gate, Method};
use crate::error::{FableError, Result};

fn check_width(oracle: &Circuit, n: usize) -> Result<()> {
    if oracle.width() != 2 * n + 1 {
        return Err(FableError::WidthMismatch {
            expected: 2 * n + 1,
            found: oracle.width(),
        });
    }
    Ok(())
}

/// `(I ⊗ H^{⊗n} ⊗ I) (I ⊗ SWAP) O_A (I ⊗ H^{⊗n} ⊗ I)`, with `alpha = 2^-n`.
pub fn assemble_fable(oracle: &Circuit, n: usize) -> Result<Circuit> {
    check_width(oracle, n)?;
    let mut c = Circuit::new(2 * n + 1);
    c.extend_unchecked((1..=n).map(|q| Gate::H { target: q }));
    c.extend_unchecked(oracle.gates().iter().copied());
    c.extend_unchecked((1..=n).map(|q| Gate::Swap { a: q, b: q + n }));
    c.extend_unchecked((1..=n).map(|q| Gate::H { target: q }));
    c.meta.method = Some(Method::Fable);
    c.meta.delta = oracle.meta.delta;
    c.meta.alpha = 1.0 / (1u64 << n) as f64;
    Ok(c)
}

/// FABLE wrapper conjugated by `H^{⊗n}` on the data register, with
/// `alpha = 1 / (2^n * norm)`.
pub fn assemble_sfable(oracle: &Circuit, n: usize, norm: f64) -> Result<Circuit> {
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(FableError::DegenerateNorm(format!(
            "S-FABLE normalisation must be positive and finite, got {norm}"
        )));
    }
    let inner = assemble_fable(oracle, n)?;
    let mut c = Circuit::new(2 * n + 1);
    let data = || (n + 1..=2 * n).map(|q| Gate::H { target: q });
    c.extend_unchecked(data());
    c.extend_unchecked(inner.gates().iter().copied());
    c.extend_unchecked(data());
    c.meta.method = Some(Method::SFable);
    c.meta.delta = oracle.meta.delta;
    c.meta.alpha = inner.meta.alpha / norm;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::AngleSet;
    use crate::circuit::ir::count_gates;
    use crate::circuit::oracle::build_oracle;

    #[test]
    fn fable_structure_for_one_qubit() {
        let oracle = build_oracle(&AngleSet::from_dense(1, &[0.5, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        let c = assemble_fable(&oracle, 1).unwrap();
        let counts = count_gates(&c, false);
        assert_eq!((counts.hadamards, counts.swaps), (2, 1));
        assert_eq!(c.gates()[0], Gate::H { target: 1 });
        assert_eq!(c.gates()[c.len() - 2], Gate::Swap { a: 1, b: 2 });
        assert_eq!(c.meta.alpha, 0.5);
    }

    #[test]
    fn full_fable_counts() {
        for n in 1..=6 {
            let len = 1usize << (2 * n);
            let angles = AngleSet::from_dense(n, &vec![0.3; len]).unwrap();
            let c = assemble_fable(&build_oracle(&angles, 0.0), n).unwrap();
            let counts = count_gates(&c, true);
            assert_eq!(counts.rotations, len);
            assert_eq!(counts.cnots, len + 3 * n);
            assert_eq!(counts.hadamards, 2 * n);
            let s = count_gates(&assemble_sfable(&build_oracle(&angles, 0.0), n, 0.5).unwrap(), true);
            assert_eq!(s.hadamards, 4 * n);
        }
    }

    #[test]
    fn width_and_norm_errors() {
        let oracle = Circuit::new(5);
        assert!(matches!(
            assemble_fable(&oracle, 1),
            Err(FableError::WidthMismatch { expected: 3, found: 5 })
        ));
        assert!(assemble_sfable(&oracle, 2, 0.0).is_err());
        assert!(assemble_sfable(&oracle, 2, -1.0).is_err());
        assert!((assemble_sfable(&oracle, 2, 0.5).unwrap().meta.alpha - 0.5).abs() < 1e-15);
    }
}
