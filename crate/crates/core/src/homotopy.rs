//! l1 homotopy used as a crash basis for the simplex.
//!
//! Follows the piecewise-linear path of `min 1/2 ||y - X b||^2 + lambda ||b||_1`
//! from `lambda = ||X^T y||_inf` down to zero. For `p >= n` in general
//! position the active set at `lambda = 0` is an optimal basis of the
//! minimum-l1 interpolation problem, so the simplex started there usually
//! only has to certify it.
//!
//! The inverse Gram matrix of the active columns is kept with bordering
//! updates and rebuilt when `X_A^T X_A d = s_A` drifts.

use nalgebra::DMatrix;

use crate::linalg::{axpy, col, dot, invert_row_major};

pub struct PathEnd {
    /// Active columns at the end of the path, in order of entry.
    pub active: Vec<usize>,
    /// Coefficients of the active columns.
    pub coef: Vec<f64>,
    pub steps: usize,
    /// Value of lambda where the walk stopped (0 when it completed).
    pub lambda: f64,
}

pub fn l1_path(x: &DMatrix<f64>, y: &[f64], max_steps: usize) -> PathEnd {
    let (n, p) = (x.nrows(), x.ncols());
    let mut c: Vec<f64> = (0..p).map(|j| dot(col(x, j), y)).collect();
    let (j0, lam0) = c.iter().enumerate().fold(
        (0, 0.0f64),
        |(bj, bv), (j, v)| {
            if v.abs() > bv {
                (j, v.abs())
            } else {
                (bj, bv)
            }
        },
    );
    let mut end = PathEnd {
        active: Vec::new(),
        coef: Vec::new(),
        steps: 0,
        lambda: lam0,
    };
    if lam0 == 0.0 || n == 0 {
        end.lambda = 0.0;
        return end;
    }
    let mut lambda = lam0;
    let mut in_set = vec![false; p];
    let mut active: Vec<usize> = Vec::with_capacity(n);
    let mut sign: Vec<f64> = Vec::with_capacity(n);
    let mut beta: Vec<f64> = Vec::with_capacity(n);
    // Row-major with stride n; the leading t x t block is live.
    let mut ginv = vec![0.0; n * n];
    let mut u = vec![0.0; n];
    let mut a = vec![0.0; p];

    // Borders the inverse with column `j`; returns `G^-1 g` and `1 / sigma`.
    let add = |j: usize, active: &mut Vec<usize>, ginv: &mut Vec<f64>| -> (Vec<f64>, f64) {
        let t = active.len();
        let xj = col(x, j);
        let g: Vec<f64> = active.iter().map(|&i| dot(col(x, i), xj)).collect();
        let mut b = vec![0.0; t];
        for r in 0..t {
            b[r] = dot(&ginv[r * n..r * n + t], &g);
        }
        let sigma = dot(xj, xj) - dot(&g, &b);
        let inv = 1.0 / sigma;
        for r in 0..t {
            let f = b[r] * inv;
            axpy(f, &b, &mut ginv[r * n..r * n + t]);
            ginv[r * n + t] = -f;
        }
        for r in 0..t {
            ginv[t * n + r] = -b[r] * inv;
        }
        ginv[t * n + t] = inv;
        active.push(j);
        (b, inv)
    };

    in_set[j0] = true;
    sign.push(c[j0].signum());
    beta.push(0.0);
    add(j0, &mut active, &mut ginv);
    // d = G^-1 s, kept up to date across additions and removals.
    let mut d: Vec<f64> = Vec::with_capacity(n);
    d.push(sign[0] * ginv[0]);

    while end.steps < max_steps {
        end.steps += 1;
        let t = active.len();
        u.fill(0.0);
        for r in 0..t {
            axpy(d[r], col(x, active[r]), &mut u);
        }
        for j in 0..p {
            a[j] = dot(col(x, j), &u);
        }
        let drift = (0..t).fold(0.0f64, |m, r| m.max((a[active[r]] - sign[r]).abs()));
        if drift > 1e-7 {
            rebuild_inverse(x, &active, &mut ginv, n);
            for r in 0..t {
                d[r] = dot(&ginv[r * n..r * n + t], &sign);
            }
            continue;
        }

        let mut gamma = lambda;
        let mut event: Option<(bool, usize)> = None;
        // With n active columns the inactive correlations scale with
        // lambda, so only departures can happen.
        for j in 0..p {
            if in_set[j] || t == n {
                continue;
            }
            for (num, den) in [(lambda - c[j], 1.0 - a[j]), (lambda + c[j], 1.0 + a[j])] {
                if den > 1e-12 {
                    let g = num / den;
                    if g > 1e-14 * lam0 && g < gamma {
                        gamma = g;
                        event = Some((true, j));
                    }
                }
            }
        }
        for r in 0..t {
            if d[r] != 0.0 {
                let g = -beta[r] / d[r];
                if g > 1e-14 * lam0 && g < gamma {
                    gamma = g;
                    event = Some((false, r));
                }
            }
        }

        for r in 0..t {
            beta[r] += gamma * d[r];
        }
        axpy(-gamma, &a, &mut c);
        lambda -= gamma;

        match event {
            None => {
                lambda = 0.0;
                break;
            }
            Some((true, j)) => {
                in_set[j] = true;
                let sj = if c[j] >= 0.0 { 1.0 } else { -1.0 };
                let (b, inv) = add(j, &mut active, &mut ginv);
                let kappa = (sj - dot(&b, &sign)) * inv;
                axpy(-kappa, &b, &mut d);
                d.push(kappa);
                sign.push(sj);
                beta.push(0.0);
            }
            Some((false, r)) => {
                let f = d[r] / ginv[r * n + r];
                for i in 0..t {
                    d[i] -= f * ginv[i * n + r];
                }
                d.swap_remove(r);
                remove(&mut ginv, n, t, r);
                in_set[active[r]] = false;
                active.swap_remove(r);
                sign.swap_remove(r);
                beta.swap_remove(r);
            }
        }
        if end.steps.is_multiple_of(64) {
            refresh_correlations(x, y, &active, &beta, &mut c);
        }
    }
    end.active = active;
    end.coef = beta;
    end.lambda = lambda;
    end
}

/// Drops row/column `r` from the live `t x t` inverse, moving the last
/// row/column into its place.
fn remove(ginv: &mut [f64], n: usize, t: usize, r: usize) {
    let hrr = ginv[r * n + r];
    let h: Vec<f64> = (0..t).map(|i| ginv[i * n + r]).collect();
    for i in 0..t {
        let f = h[i] / hrr;
        if f != 0.0 {
            axpy(-f, &h, &mut ginv[i * n..i * n + t]);
        }
    }
    let last = t - 1;
    if r != last {
        for i in 0..t {
            ginv[i * n + r] = ginv[i * n + last];
        }
        for j in 0..t {
            ginv[r * n + j] = ginv[last * n + j];
        }
        ginv[r * n + r] = ginv[last * n + last];
    }
}

fn rebuild_inverse(x: &DMatrix<f64>, active: &[usize], ginv: &mut [f64], n: usize) {
    let t = active.len();
    let mut g = vec![0.0; t * t];
    for i in 0..t {
        for j in 0..=i {
            let v = dot(col(x, active[i]), col(x, active[j]));
            g[i * t + j] = v;
            g[j * t + i] = v;
        }
    }
    if invert_row_major(&mut g, t, 1e-15).is_some() {
        for i in 0..t {
            ginv[i * n..i * n + t].copy_from_slice(&g[i * t..(i + 1) * t]);
        }
    }
}

fn refresh_correlations(x: &DMatrix<f64>, y: &[f64], active: &[usize], beta: &[f64], c: &mut [f64]) {
    let mut r = y.to_vec();
    for (&j, &b) in active.iter().zip(beta) {
        axpy(-b, col(x, j), &mut r);
    }
    for (j, cj) in c.iter_mut().enumerate() {
        *cj = dot(col(x, j), &r);
    }
}
