//! Binary-reflected Gray codes.

use crate::error::{FableError, Result};

/// `k`-th binary-reflected Gray code.
#[inline]
pub fn gray_code(k: usize) -> usize {
    k ^ (k >> 1)
}

/// Position of code `g` in the binary-reflected Gray sequence.
#[inline]
pub fn gray_inverse(mut g: usize) -> usize {
    let mut k = g;
    while g > 0 {
        g >>= 1;
        k ^= g;
    }
    k
}

/// Gray sequence over `m` bits together with the bit flipped at each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayTable {
    pub m: usize,
    pub codes: Vec<usize>,
    /// `transition_bits[j]` is the bit that differs between `codes[j]` and `codes[j + 1]`.
    pub transition_bits: Vec<u32>,
}

pub fn gray_table(m: usize) -> Result<GrayTable> {
    if m == 0 {
        return Err(FableError::Dimension("Gray table needs m >= 1".into()));
    }
    if m >= usize::BITS as usize {
        return Err(FableError::Dimension(format!("Gray table width {m} too large")));
    }
    let len = 1usize << m;
    let codes: Vec<usize> = (0..len).map(gray_code).collect();
    let transition_bits = codes
        .windows(2)
        .map(|w| (w[0] ^ w[1]).trailing_zeros())
        .collect();
    Ok(GrayTable {
        m,
        codes,
        transition_bits,
    })
}
