//! Log-log least-squares fits of error scaling laws.

use crate::error::{FableError, Result};

/// `epsilon ≈ coefficient * s^s_exponent * N^n_exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub coefficient: f64,
    pub s_exponent: f64,
    pub n_exponent: f64,
    /// Root-mean-square residual of the fit in natural-log space.
    pub residual: f64,
}

impl ScalingFit {
    pub fn predict(&self, s: f64, dim: f64) -> f64 {
        self.coefficient * s.powf(self.s_exponent) * dim.powf(self.n_exponent)
    }
}

/// One observation for [`fit_scaling`]: relative sparsity, qubits, error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub s: f64,
    pub n: usize,
    pub epsilon: f64,
}

/// `y ≈ coefficient * x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub coefficient: f64,
    pub exponent: f64,
    pub residual: f64,
}

/// Fits `log epsilon = log c + a log s + b log N` by least squares.
///
/// Needs at least 6 points covering at least 2 values each of `s` and `n`.
pub fn fit_scaling(points: &[ScalingPoint]) -> Result<ScalingFit> {
    if points.len() < 6 {
        return Err(FableError::RankDeficient(format!(
            "scaling fit needs at least 6 points, got {}",
            points.len()
        )));
    }
    let distinct = |vals: Vec<f64>| {
        let mut v = vals;
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if distinct(points.iter().map(|p| p.s).collect()) < 2
        || distinct(points.iter().map(|p| p.n as f64).collect()) < 2
    {
        return Err(FableError::RankDeficient(
            "scaling fit needs at least two values of both s and n".into(),
        ));
    }
    let mut rows = Vec::with_capacity(points.len());
    let mut y = Vec::with_capacity(points.len());
    for p in points {
        check_positive("s", p.s)?;
        check_positive("epsilon", p.epsilon)?;
        rows.push(vec![1.0, p.s.ln(), p.n as f64 * std::f64::consts::LN_2]);
        y.push(p.epsilon.ln());
    }
    let (beta, residual) = least_squares(&rows, &y)?;
    Ok(ScalingFit {
        coefficient: beta[0].exp(),
        s_exponent: beta[1],
        n_exponent: beta[2],
        residual,
    })
}

/// Fits `log y = log c + e log x`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerFit> {
    let mut rows = Vec::with_capacity(points.len());
    let mut y = Vec::with_capacity(points.len());
    for &(x, v) in points {
        check_positive("x", x)?;
        check_positive("y", v)?;
        rows.push(vec![1.0, x.ln()]);
        y.push(v.ln());
    }
    let (beta, residual) = least_squares(&rows, &y)?;
    Ok(PowerFit {
        coefficient: beta[0].exp(),
        exponent: beta[1],
        residual,
    })
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(FableError::Config(format!("log fit needs positive finite {name}, got {v}")))
    }
}

/// Householder QR least squares. Returns the coefficients and the RMS residual.
fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = rows.len();
    let p = rows.first().map_or(0, Vec::len);
    if m < p || p == 0 {
        return Err(FableError::RankDeficient(format!(
            "{m} observations cannot determine {p} coefficients"
        )));
    }
    // Column-major copy of the design matrix.
    let mut a: Vec<Vec<f64>> = (0..p).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let col_norms: Vec<f64> = a.iter().map(|c| norm(c)).collect();
    let mut b = y.to_vec();
    for k in 0..p {
        let alpha = {
            let tail = norm(&a[k][k..]);
            if a[k][k] > 0.0 {
                -tail
            } else {
                tail
            }
        };
        if alpha.abs() <= 1e-12 * col_norms[k].max(f64::MIN_POSITIVE) {
            return Err(FableError::RankDeficient(format!(
                "design column {k} is linearly dependent on the others"
            )));
        }
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(x, c)| x * c).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, x) in col.iter_mut().zip(&v) {
                *c -= f * x;
            }
        };
        for col in a.iter_mut().skip(k) {
            reflect(&mut col[k..]);
        }
        reflect(&mut b[k..]);
    }
    let mut beta = vec![0.0; p];
    for k in (0..p).rev() {
        let mut acc = b[k];
        for j in k + 1..p {
            acc -= a[j][k] * beta[j];
        }
        beta[k] = acc / a[k][k];
    }
    let rss: f64 = b[p..].iter().map(|x| x * x).sum();
    Ok((beta, (rss / m as f64).sqrt()))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
