//! Dense kernels shared by the solvers.
//!
//! Reductions use eight independent partial sums in a fixed order, so the
//! results are bit-identical across runs and targets (no reassociation is
//! left to the compiler).

use nalgebra::DMatrix;

const LANES: usize = 8;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; LANES];
    let ca = a.chunks_exact(LANES);
    let cb = b.chunks_exact(LANES);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..LANES {
            acc[l] += x[l] * y[l];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

#[inline]
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Contiguous column `j` of a column-major matrix.
#[inline]
pub fn col(m: &DMatrix<f64>, j: usize) -> &[f64] {
    let n = m.nrows();
    &m.as_slice()[j * n..(j + 1) * n]
}

/// `out = M * v` for a column-major matrix.
pub fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.nrows()];
    for (j, &vj) in v.iter().enumerate() {
        if vj != 0.0 {
            axpy(vj, col(m, j), &mut out);
        }
    }
    out
}

/// `out[j] = M_j . v` for every column `j`.
pub fn mat_t_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.ncols()).map(|j| dot(col(m, j), v)).collect()
}

/// In-place Gauss-Jordan inversion of a row-major `k x k` matrix with
/// partial pivoting. Returns the 1-norm condition estimate
/// `||A||_1 * ||A^-1||_1`, or `None` when a pivot falls below
/// `singular_tol * ||A||_max`.
pub fn invert_row_major(a: &mut [f64], k: usize, singular_tol: f64) -> Option<f64> {
    debug_assert_eq!(a.len(), k * k);
    let norm1_a = column_abs_max(a, k);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if k == 0 {
        return Some(1.0);
    }
    if scale == 0.0 {
        return None;
    }
    let mut perm = vec![0usize; k];
    let mut pivot_row = vec![0.0; k];
    for c in 0..k {
        let mut best = c;
        let mut best_val = a[c * k + c].abs();
        for r in c + 1..k {
            let v = a[r * k + c].abs();
            if v > best_val {
                best = r;
                best_val = v;
            }
        }
        if best_val <= singular_tol * scale {
            return None;
        }
        perm[c] = best;
        if best != c {
            for j in 0..k {
                a.swap(c * k + j, best * k + j);
            }
        }
        let piv = a[c * k + c];
        a[c * k + c] = 1.0;
        let inv = 1.0 / piv;
        for v in &mut a[c * k..(c + 1) * k] {
            *v *= inv;
        }
        pivot_row.copy_from_slice(&a[c * k..(c + 1) * k]);
        for r in 0..k {
            if r == c {
                continue;
            }
            let f = a[r * k + c];
            if f != 0.0 {
                a[r * k + c] = 0.0;
                axpy(-f, &pivot_row, &mut a[r * k..(r + 1) * k]);
            }
        }
    }
    for c in (0..k).rev() {
        let p = perm[c];
        if p != c {
            for r in 0..k {
                a.swap(r * k + c, r * k + p);
            }
        }
    }
    Some(norm1_a * column_abs_max(a, k))
}

fn column_abs_max(a: &[f64], k: usize) -> f64 {
    let mut sums = vec![0.0; k];
    for row in a.chunks_exact(k) {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v.abs();
        }
    }
    sums.into_iter().fold(0.0, f64::max)
}

/// Householder QR of a column-major `m x k` matrix (`m >= k`), in place.
///
/// On return the upper triangle holds `R` and the strict lower part holds
/// the reflector tails (unit leading entry implied), LAPACK `geqrf` style.
pub struct HouseholderQr {
    pub m: usize,
    pub k: usize,
    pub a: Vec<f64>,
    pub tau: Vec<f64>,
}

impl HouseholderQr {
    pub fn factor(mut a: Vec<f64>, m: usize, k: usize) -> Self {
        assert!(m >= k && a.len() == m * k);
        let mut tau = vec![0.0; k];
        for j in 0..k {
            let (head, tail) = a.split_at_mut((j + 1) * m);
            let cj = &mut head[j * m..];
            let alpha = cj[j];
            let xnorm = norm2(&cj[j + 1..]);
            if xnorm == 0.0 {
                tau[j] = 0.0;
                continue;
            }
            let beta = -alpha.signum() * alpha.hypot(xnorm);
            let beta = if beta == 0.0 { -xnorm } else { beta };
            tau[j] = (beta - alpha) / beta;
            let s = 1.0 / (alpha - beta);
            for v in &mut cj[j + 1..] {
                *v *= s;
            }
            cj[j] = 1.0;
            let v = &cj[j..];
            for l in 0..k - j - 1 {
                let cl = &mut tail[l * m + j..(l + 1) * m];
                let w = tau[j] * dot(v, cl);
                axpy(-w, v, cl);
            }
            cj[j] = beta;
        }
        Self { m, k, a, tau }
    }

    #[inline]
    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.a[j * self.m + i]
    }

    fn reflect(&self, j: usize, b: &mut [f64]) {
        if self.tau[j] == 0.0 {
            return;
        }
        let cj = &self.a[j * self.m..(j + 1) * self.m];
        let mut w = b[j];
        w += dot(&cj[j + 1..], &b[j + 1..]);
        w *= self.tau[j];
        b[j] -= w;
        axpy(-w, &cj[j + 1..], &mut b[j + 1..]);
    }

    /// `b <- Q^T b`
    pub fn apply_qt(&self, b: &mut [f64]) {
        for j in 0..self.k {
            self.reflect(j, b);
        }
    }

    /// `b <- Q b`
    pub fn apply_q(&self, b: &mut [f64]) {
        for j in (0..self.k).rev() {
            self.reflect(j, b);
        }
    }

    /// Smallest `|R_jj| / max_i |R_ii|`.
    pub fn diag_ratio(&self) -> f64 {
        let d: Vec<f64> = (0..self.k).map(|j| self.r(j, j).abs()).collect();
        let max = d.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        d.iter().cloned().fold(f64::INFINITY, f64::min) / max
    }

    /// Solves `R x = b` (upper triangular, first `k` entries of `b`).
    pub fn solve_r(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b[..self.k].to_vec();
        for i in (0..self.k).rev() {
            let mut s = x[i];
            for j in i + 1..self.k {
                s -= self.r(i, j) * x[j];
            }
            x[i] = s / self.r(i, i);
        }
        x
    }

    /// Solves `R^T x = b` (lower triangular).
    pub fn solve_rt(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b[..self.k].to_vec();
        for i in 0..self.k {
            let ci = &self.a[i * self.m..i * self.m + i];
            let s = x[i] - dot(ci, &x[..i]);
            x[i] = s / self.r(i, i);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive_sum() {
        let a: Vec<f64> = (0..37).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..37).map(|i| (i as f64 * 0.11).cos()).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-13);
    }

    #[test]
    fn gauss_jordan_inverts() {
        let k = 5;
        let mut a: Vec<f64> = (0..k * k)
            .map(|i| ((i * 7 + 3) % 11) as f64 - 5.0 + if i % (k + 1) == 0 { 9.0 } else { 0.0 })
            .collect();
        let orig = a.clone();
        let cond = invert_row_major(&mut a, k, 1e-14).unwrap();
        assert!(cond >= 1.0);
        for i in 0..k {
            for j in 0..k {
                let s: f64 = (0..k).map(|l| orig[i * k + l] * a[l * k + j]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((s - e).abs() < 1e-12, "({i},{j}) = {s}");
            }
        }
    }

    #[test]
    fn gauss_jordan_needs_row_swaps() {
        let mut a = vec![0.0, 1.0, 1.0, 0.0];
        invert_row_major(&mut a, 2, 1e-14).unwrap();
        assert_eq!(a, vec![0.0, 1.0, 1.0, 0.0]);
        let mut s = vec![1.0, 2.0, 2.0, 4.0];
        assert!(invert_row_major(&mut s, 2, 1e-12).is_none());
    }

    #[test]
    fn householder_solves_least_squares() {
        // 4x2 overdetermined system with an exact solution (1, -2).
        let a = vec![1.0, 2.0, 0.0, 1.0, 0.5, -1.0, 3.0, 2.0];
        let x_true = [1.0, -2.0];
        let b: Vec<f64> = (0..4).map(|i| a[i] * x_true[0] + a[4 + i] * x_true[1]).collect();
        let qr = HouseholderQr::factor(a, 4, 2);
        let mut c = b.clone();
        qr.apply_qt(&mut c);
        let x = qr.solve_r(&c);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] + 2.0).abs() < 1e-12);
        let mut back = c.clone();
        qr.apply_q(&mut back);
        for (u, v) in back.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}
