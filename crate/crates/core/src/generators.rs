//! Seeded matrix families used by the experiments.
//!
//! All randomness comes from [`CounterRng`], so a matrix is a pure function
//! of its [`GenSpec`].

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{FableError, Result};
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    UniformSparse,
    BinarySparse,
    NonnegSparse,
    /// Nonneg sparse with every value multiplied by a uniform `[-1, 1]` factor.
    SignedNonnegSparse,
    ThresholdedPositive,
    /// `thresholded_positive` with the same sign randomisation.
    SignedThresholdedPositive,
    Heisenberg,
    Laplacian2d,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::UniformSparse => "uniform_sparse",
            Family::BinarySparse => "binary_sparse",
            Family::NonnegSparse => "nonneg_sparse",
            Family::SignedNonnegSparse => "signed_nonneg_sparse",
            Family::ThresholdedPositive => "thresholded_positive",
            Family::SignedThresholdedPositive => "signed_thresholded_positive",
            Family::Heisenberg => "heisenberg",
            Family::Laplacian2d => "laplacian2d",
        }
    }

    /// Structured families are rescaled to unit max entry before encoding.
    pub fn is_structured(self) -> bool {
        matches!(self, Family::Heisenberg | Family::Laplacian2d)
    }
}

impl std::str::FromStr for Family {
    type Err = FableError;

    fn from_str(s: &str) -> Result<Self> {
        let all = [
            Family::UniformSparse,
            Family::BinarySparse,
            Family::NonnegSparse,
            Family::SignedNonnegSparse,
            Family::ThresholdedPositive,
            Family::SignedThresholdedPositive,
            Family::Heisenberg,
            Family::Laplacian2d,
        ];
        all.into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| FableError::Config(format!("unknown matrix family {s:?}")))
    }
}

fn default_threshold() -> f64 {
    0.7
}

/// Declarative description of one generated matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub family: Family,
    #[serde(default)]
    pub n: usize,
    /// Relative sparsity `|A| / N` (sparse families; the expected value for
    /// `thresholded_positive`).
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub jx: f64,
    #[serde(default)]
    pub jy: f64,
    #[serde(default)]
    pub jz: f64,
    #[serde(default)]
    pub hz: f64,
    /// Draw `jx, jy, jz, hz` uniformly from `[-1, 1]` using `seed`.
    #[serde(default)]
    pub random_couplings: bool,
    /// Qubits of the Laplacian's x factor; the y factor gets `n - nx`.
    #[serde(default)]
    pub nx: Option<usize>,
    #[serde(default)]
    pub periodic: bool,
    /// Lower bound of the values of `thresholded_positive`.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

impl GenSpec {
    pub fn new(family: Family, n: usize) -> Self {
        GenSpec {
            family,
            n,
            s: 0.0,
            seed: 0,
            jx: 0.0,
            jy: 0.0,
            jz: 0.0,
            hz: 0.0,
            random_couplings: false,
            nx: None,
            periodic: false,
            threshold: default_threshold(),
        }
    }

    pub fn sparse(family: Family, n: usize, s: f64, seed: u64) -> Self {
        GenSpec {
            s,
            seed,
            ..Self::new(family, n)
        }
    }

    /// Effective `(jx, jy, jz, hz)`.
    pub fn couplings(&self) -> [f64; 4] {
        if self.random_couplings {
            let mut rng = CounterRng::new(self.seed);
            [(); 4].map(|_| rng.uniform(-1.0, 1.0))
        } else {
            [self.jx, self.jy, self.jz, self.hz]
        }
    }

    pub fn generate(&self) -> Result<SparseMatrix> {
        let n = self.n;
        match self.family {
            Family::UniformSparse => gen_uniform_sparse(n, self.s, self.seed),
            Family::BinarySparse => gen_binary_sparse(n, self.s, self.seed),
            Family::NonnegSparse => gen_nonneg_sparse(n, self.s, self.seed),
            Family::SignedNonnegSparse => {
                Ok(randomize_signs(&gen_nonneg_sparse(n, self.s, self.seed)?, self.seed))
            }
            Family::ThresholdedPositive => {
                gen_thresholded_positive(n, self.s / (1u64 << n) as f64, self.threshold, self.seed)
            }
            Family::SignedThresholdedPositive => Ok(randomize_signs(
                &gen_thresholded_positive(n, self.s / (1u64 << n) as f64, self.threshold, self.seed)?,
                self.seed,
            )),
            Family::Heisenberg => {
                let [jx, jy, jz, hz] = self.couplings();
                Ok(SparseMatrix::from_dense(&gen_heisenberg(n, jx, jy, jz, hz)?))
            }
            Family::Laplacian2d => {
                let nx = self.nx.unwrap_or(n / 2);
                if nx > n {
                    return Err(FableError::Config(format!("nx = {nx} exceeds n = {n}")));
                }
                Ok(SparseMatrix::from_dense(&gen_laplacian2d(nx, n - nx, self.periodic)?))
            }
        }
    }

    /// [`Self::generate`], with structured families divided by their max entry.
    pub fn generate_for_encoding(&self) -> Result<SparseMatrix> {
        let a = self.generate()?;
        if self.family.is_structured() {
            let m = a.max_abs_entry();
            if m > 0.0 {
                return Ok(a.scale(1.0 / m));
            }
        }
        Ok(a)
    }
}

fn target_count(n: usize, s: f64) -> Result<usize> {
    let dim = 1usize << n;
    let count = (s * dim as f64).round();
    if !(count >= 1.0) || count > (dim * dim) as f64 {
        return Err(FableError::InfeasibleCount(format!(
            "s = {s} asks for {count} nonzeros in a {dim}x{dim} matrix"
        )));
    }
    Ok(count as usize)
}

/// `count` distinct cells of an `N x N` matrix, by a partial Fisher–Yates
/// shuffle of the linear indices (swaps kept in a map, so memory is `O(count)`).
fn sample_cells(n: usize, count: usize, rng: &mut CounterRng) -> Vec<(usize, usize)> {
    let dim = 1usize << n;
    let total = dim * dim;
    let mut swapped: HashMap<usize, usize> = HashMap::with_capacity(2 * count);
    let mut cells = Vec::with_capacity(count);
    for i in 0..count {
        let j = i + rng.below((total - i) as u64) as usize;
        let pick = *swapped.get(&j).unwrap_or(&j);
        let displaced = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, displaced);
        cells.push((pick / dim, pick % dim));
    }
    cells
}

fn sparse_with_values(
    n: usize,
    s: f64,
    seed: u64,
    mut value: impl FnMut(&mut CounterRng) -> f64,
) -> Result<SparseMatrix> {
    let count = target_count(n, s)?;
    let mut rng = CounterRng::new(seed);
    let cells = sample_cells(n, count, &mut rng);
    let entries = cells
        .into_iter()
        .map(|(r, c)| (r, c, value(&mut rng)))
        .collect();
    SparseMatrix::new(n, entries)
}

fn nonzero_uniform(rng: &mut CounterRng, lo: f64, hi: f64) -> f64 {
    loop {
        let v = rng.uniform(lo, hi);
        if v != 0.0 {
            return v;
        }
    }
}

/// `round(s N)` uniformly placed nonzeros with values uniform on `[-1, 1]`.
pub fn gen_uniform_sparse(n: usize, s: f64, seed: u64) -> Result<SparseMatrix> {
    sparse_with_values(n, s, seed, |rng| nonzero_uniform(rng, -1.0, 1.0))
}

/// Same placement as [`gen_uniform_sparse`], every value 1.
pub fn gen_binary_sparse(n: usize, s: f64, seed: u64) -> Result<SparseMatrix> {
    sparse_with_values(n, s, seed, |_| 1.0)
}

/// Same placement, values uniform on `(0, 1]`.
pub fn gen_nonneg_sparse(n: usize, s: f64, seed: u64) -> Result<SparseMatrix> {
    sparse_with_values(n, s, seed, |rng| 1.0 - rng.next_f64())
}

/// Multiplies every stored value by an independent nonzero uniform `[-1, 1]` factor.
pub fn randomize_signs(a: &SparseMatrix, seed: u64) -> SparseMatrix {
    let mut rng = CounterRng::new(crate::rng::derive_seed(seed, &[0x5167]));
    a.map_values(|_, _, v| v * nonzero_uniform(&mut rng, -1.0, 1.0))
}

/// Each cell is nonzero with probability `density`; values uniform on `(threshold, 1]`.
pub fn gen_thresholded_positive(
    n: usize,
    density: f64,
    threshold: f64,
    seed: u64,
) -> Result<SparseMatrix> {
    if !(0.0..1.0).contains(&threshold) {
        return Err(FableError::Config(format!("threshold {threshold} not in [0, 1)")));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(FableError::Config(format!("density {density} not in [0, 1]")));
    }
    let dim = 1usize << n;
    let mut rng = CounterRng::new(seed);
    let mut entries = Vec::new();
    for r in 0..dim {
        for c in 0..dim {
            if rng.next_f64() < density {
                let v = threshold + (1.0 - threshold) * (1.0 - rng.next_f64());
                entries.push((r, c, v));
            }
        }
    }
    SparseMatrix::new(n, entries)
}

/// Open-chain Heisenberg Hamiltonian
/// `sum_i (jx X_i X_{i+1} + jy Y_i Y_{i+1} + jz Z_i Z_{i+1}) + hz sum_i Z_i`.
///
/// Qubit `i` is bit `n - 1 - i` of the basis index. `Y ⊗ Y` is real:
/// it flips both bits with sign `-(-1)^{b_i + b_{i+1}}`.
pub fn gen_heisenberg(n: usize, jx: f64, jy: f64, jz: f64, hz: f64) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(FableError::Dimension(format!("Heisenberg chain needs n >= 2, got {n}")));
    }
    let mut h = DenseMatrix::zeros(n);
    let sign = |b: usize| if b == 0 { 1.0 } else { -1.0 };
    for state in 0..h.dim() {
        let bit = |q: usize| (state >> (n - 1 - q)) & 1;
        let mut diag = 0.0;
        for q in 0..n {
            diag += hz * sign(bit(q));
        }
        for q in 0..n - 1 {
            let (b0, b1) = (bit(q), bit(q + 1));
            diag += jz * sign(b0) * sign(b1);
            let flipped = state ^ (1 << (n - 1 - q)) ^ (1 << (n - 2 - q));
            let off = jx - jy * sign(b0) * sign(b1);
            if off != 0.0 {
                let cur = h.get(flipped, state);
                h.set(flipped, state, cur + off);
            }
        }
        let cur = h.get(state, state);
        h.set(state, state, cur + diag);
    }
    Ok(h)
}

/// 1-D second-difference matrix on `2^m` points: 2 on the diagonal, -1 on
/// the neighbours, plus -1 corner couplings when `periodic`.
pub fn gen_laplacian1d(m: usize, periodic: bool) -> DenseMatrix {
    let dim = 1usize << m;
    let mut l = DenseMatrix::zeros(m);
    for i in 0..dim {
        l.set(i, i, 2.0);
        if i + 1 < dim {
            l.set(i, i + 1, -1.0);
            l.set(i + 1, i, -1.0);
        }
    }
    if periodic && dim > 1 {
        let corner = l.get(0, dim - 1) - 1.0;
        l.set(0, dim - 1, corner);
        l.set(dim - 1, 0, corner);
    }
    l
}

/// `L = L_xx ⊗ I + I ⊗ L_yy` with `2^nx` and `2^ny` points per axis.
pub fn gen_laplacian2d(nx: usize, ny: usize, periodic: bool) -> Result<DenseMatrix> {
    if nx == 0 || ny == 0 {
        return Err(FableError::Dimension(format!(
            "2-D Laplacian needs at least one qubit per axis, got nx={nx}, ny={ny}"
        )));
    }
    let lx = gen_laplacian1d(nx, periodic);
    let ly = gen_laplacian1d(ny, periodic);
    let my = 1usize << ny;
    Ok(DenseMatrix::from_fn(nx + ny, |r, c| {
        let (rx, ry, cx, cy) = (r / my, r % my, c / my, c % my);
        let mut v = 0.0;
        if ry == cy {
            v += lx.get(rx, cx);
        }
        if rx == cx {
            v += ly.get(ry, cy);
        }
        v
    }))
}
