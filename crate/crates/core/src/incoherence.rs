//! Mutual incoherence of a normalized design and the K factor.
//!
//! `M` is the largest `|X_i^T X_j|` over distinct columns. Below
//! [`GRAM_THRESHOLD`] columns the full Gram matrix is formed; above it the
//! pairs are visited in square blocks so memory stays at
//! `O(n * block + block^2)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::NormalizedDesign;

pub const GRAM_THRESHOLD: usize = 2048;
pub const BLOCK: usize = 256;

pub fn incoherence(design: &NormalizedDesign) -> f64 {
    incoherence_with(&design.columns, GRAM_THRESHOLD)
}

/// As [`incoherence`], using the explicit Gram matrix when `p <= gram_threshold`.
pub fn incoherence_with(x: &DMatrix<f64>, gram_threshold: usize) -> f64 {
    column_maxima(x, x.ncols(), gram_threshold)
        .into_iter()
        .fold(0.0, f64::max)
}

/// `M` of every prefix design `X[:, ..w]` for the given widths.
///
/// One pass over the widest prefix: the pair `(i, j)` with `i < j` first
/// appears in prefixes wider than `j`.
pub fn incoherence_profile(design: &NormalizedDesign, widths: &[usize]) -> Result<Vec<f64>> {
    let p = design.p();
    let widest = widths.iter().copied().max().unwrap_or(0);
    if widest > p || widths.iter().any(|&w| w < 2) {
        return Err(Error::InvalidParameter(format!("prefix widths must lie in 2..={p}")));
    }
    let per_col = column_maxima(&design.columns, widest, GRAM_THRESHOLD);
    let mut running = Vec::with_capacity(widest);
    let mut m = 0.0f64;
    for v in per_col {
        m = m.max(v);
        running.push(m);
    }
    Ok(widths.iter().map(|&w| running[w - 1]).collect())
}

/// `K = (1 + M) / (s M) - 4`.
pub fn k_factor(m: f64, s: usize) -> Result<f64> {
    if m <= 1e-15 {
        return Err(Error::DegenerateIncoherence(m));
    }
    if s == 0 {
        return Err(Error::InvalidParameter("K needs s >= 1".into()));
    }
    Ok((1.0 + m) / (s as f64 * m) - 4.0)
}

/// `out[j] = max_{i < j} |X_i^T X_j|` over the first `p` columns (`out[0] = 0`).
fn column_maxima(x: &DMatrix<f64>, p: usize, gram_threshold: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; p];
    if p <= gram_threshold {
        let x = x.columns(0, p);
        let g = x.transpose() * x;
        for j in 1..p {
            out[j] = g.column(j).rows(0, j).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        }
        return out;
    }
    // Row-major left blocks keep every product on the gemm path.
    let mut g = DMatrix::<f64>::zeros(BLOCK, BLOCK);
    for bi in (0..p).step_by(BLOCK) {
        let wi = BLOCK.min(p - bi);
        let left = x.columns(bi, wi).transpose();
        for bj in (bi..p).step_by(BLOCK) {
            let wj = BLOCK.min(p - bj);
            let mut gv = g.view_mut((0, 0), (wi, wj));
            gv.gemm(1.0, &left, &x.columns(bj, wj), 0.0);
            for c in 0..wj {
                let rows = if bi == bj { c } else { wi };
                let m = gv.column(c).rows(0, rows).iter().fold(0.0f64, |m, v| m.max(v.abs()));
                out[bj + c] = out[bj + c].max(m);
            }
        }
    }
    out
}
