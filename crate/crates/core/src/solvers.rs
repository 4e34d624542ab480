//! Interpolating estimators and the brute-force oracle.
//!
//! Basis Pursuit and the noise-only interpolator are LPs over the split
//! `beta = u - v` (see [`ConstraintMatrix::Mirrored`]). The simplex starts
//! from the active set at the end of the l1 homotopy path, padded with the
//! columns most correlated with the target. Any `n` independent columns
//! give a feasible basis once signs are chosen, so phase 1 is normally
//! skipped.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::homotopy;
use crate::linalg::{self, col, HouseholderQr};
use crate::lp::{self, ConstraintMatrix, LinearProgram, Sense, SolveOptions, SolveResult, Status, Tolerances};
use crate::model::{rescale_model, TrainingSet};

#[derive(Clone, Debug)]
pub struct InterpolatorOutput {
    /// `beta_hat` for the regression estimators, `w^I` for the noise fit.
    pub estimate: Vec<f64>,
    /// Model error `w` in scaled coordinates (`beta_hat - beta_scaled`, or
    /// `w^I` itself).
    pub error: Vec<f64>,
    pub model_error_l2: f64,
    pub model_error_l1: f64,
    pub model_error_l2_unscaled: f64,
    pub nonzero_count: usize,
    /// `||X estimate - target||_inf`
    pub residual: f64,
    pub solver: Option<SolveResult>,
    /// Multipliers with `|lambda^T A_i| <= 1` whose value `lambda^T (-eps)`
    /// certifies `||w^I||_1` (noise interpolator only).
    pub lambda: Option<Vec<f64>>,
}

impl InterpolatorOutput {
    fn build(
        ts: &TrainingSet,
        estimate: Vec<f64>,
        error: Vec<f64>,
        target: &[f64],
        solver: Option<SolveResult>,
    ) -> Self {
        let fitted = linalg::mat_vec(ts.x(), &estimate);
        let residual = fitted.iter().zip(target).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let unscaled = rescale_model(&error, &ts.design.column_norms, ts.n);
        InterpolatorOutput {
            model_error_l2: linalg::norm2(&error),
            model_error_l1: linalg::norm1(&error),
            model_error_l2_unscaled: linalg::norm2(&unscaled),
            nonzero_count: estimate.iter().filter(|v| **v != 0.0).count(),
            estimate,
            error,
            residual,
            solver,
            lambda: None,
        }
    }
}

/// `min ||b||_1 s.t. A b = target` over the split variables.
fn l1_interpolate(a: DMatrix<f64>, target: &[f64], tol: &Tolerances) -> Result<(Vec<f64>, SolveResult)> {
    let (n, p) = (a.nrows(), a.ncols());
    let mut hint = homotopy::l1_path(&a, target, 4 * n + 16).active;
    if hint.len() < n {
        let mut taken = vec![false; p];
        for &j in &hint {
            taken[j] = true;
        }
        let corr = linalg::mat_t_vec(&a, target);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| corr[b].abs().total_cmp(&corr[a].abs()).then(a.cmp(&b)));
        let missing = n - hint.len();
        hint.extend(order.into_iter().filter(|&j| !taken[j]).take(missing));
    }
    let lp = LinearProgram::nonnegative(
        vec![1.0; 2 * p],
        ConstraintMatrix::Mirrored(a),
        target.to_vec(),
        Sense::Minimize,
    );
    let opts = SolveOptions {
        tolerances: *tol,
        initial_basis: Some(hint),
    };
    let res = lp::lp_solve_with(&lp, &opts)?;
    if res.status != Status::Optimal || res.redundant_rows > 0 {
        return Err(Error::RankDeficient);
    }
    let b = (0..p).map(|j| res.solution[j] - res.solution[j + p]).collect();
    Ok((b, res))
}

pub fn basis_pursuit(ts: &TrainingSet) -> Result<InterpolatorOutput> {
    basis_pursuit_with(ts, &Tolerances::default())
}

/// Minimum-l1 interpolator. Accepts `p >= n`.
pub fn basis_pursuit_with(ts: &TrainingSet, tol: &Tolerances) -> Result<InterpolatorOutput> {
    if ts.p < ts.n {
        return Err(Error::InvalidParameter(format!(
            "basis pursuit needs p >= n, got n={}, p={}",
            ts.n, ts.p
        )));
    }
    let (beta_hat, res) = l1_interpolate(ts.x().clone(), &ts.observations, tol)?;
    let beta_hat = sparsify(&beta_hat, ts)?;
    let error = beta_hat.iter().zip(&ts.truth.beta_scaled).map(|(a, b)| a - b).collect();
    Ok(InterpolatorOutput::build(
        ts,
        beta_hat,
        error,
        &ts.observations,
        Some(res),
    ))
}

pub fn noise_interpolator(ts: &TrainingSet) -> Result<InterpolatorOutput> {
    noise_interpolator_with(ts, &Tolerances::default())
}

/// Minimum-l1 fit of the noise alone with the true support excluded.
pub fn noise_interpolator_with(ts: &TrainingSet, tol: &Tolerances) -> Result<InterpolatorOutput> {
    let (n, p, s) = (ts.n, ts.p, ts.s);
    if p - s.min(p) < n {
        return Err(Error::RegimeViolation(format!(
            "w^I needs p - s >= n, got p={p}, s={s}, n={n}"
        )));
    }
    let a = ts.x().columns(s, p - s).into_owned();
    let (tail, res) = l1_interpolate(a, &ts.noise.values, tol)?;
    let mut w = vec![0.0; p];
    w[s..].copy_from_slice(&tail);
    let lambda: Vec<f64> = res.dual_multipliers.iter().map(|v| -v).collect();
    let mut out = InterpolatorOutput::build(ts, w.clone(), w, &ts.noise.values, Some(res));
    out.lambda = Some(lambda);
    Ok(out)
}

/// `lambda^T (-eps)` after checking `|lambda^T X_i| <= 1 + 1e-8` on every
/// off-support column.
#[allow(non_snake_case)]
pub fn dual_value_wI(ts: &TrainingSet, lambda: &[f64]) -> Result<f64> {
    if lambda.len() != ts.n {
        return Err(Error::DimensionMismatch(format!(
            "lambda has length {}, expected {}",
            lambda.len(),
            ts.n
        )));
    }
    let mut worst: Option<(usize, f64)> = None;
    for i in ts.s..ts.p {
        let v = linalg::dot(ts.design.column(i), lambda).abs();
        if v > 1.0 + 1e-8 && worst.is_none_or(|(_, w)| v > w) {
            worst = Some((i, v));
        }
    }
    if let Some((index, value)) = worst {
        return Err(Error::FeasibilityError { index, value });
    }
    Ok(-linalg::dot(lambda, &ts.noise.values))
}

pub fn min_l2_overfit(ts: &TrainingSet) -> Result<InterpolatorOutput> {
    let (n, p) = (ts.n, ts.p);
    if p < n {
        return Err(Error::InvalidParameter(format!(
            "min-l2 interpolation needs p >= n, got n={n}, p={p}"
        )));
    }
    let x = ts.x();
    let mut xt = vec![0.0; p * n];
    for j in 0..p {
        for (i, v) in col(x, j).iter().enumerate() {
            xt[i * p + j] = *v;
        }
    }
    let qr = HouseholderQr::factor(xt, p, n);
    if qr.diag_ratio() < 1e-12 {
        return Err(Error::RankDeficient);
    }
    let z = qr.solve_rt(&ts.observations);
    let mut beta_hat = vec![0.0; p];
    beta_hat[..n].copy_from_slice(&z);
    qr.apply_q(&mut beta_hat);
    let error = beta_hat.iter().zip(&ts.truth.beta_scaled).map(|(a, b)| a - b).collect();
    Ok(InterpolatorOutput::build(ts, beta_hat, error, &ts.observations, None))
}

/// Least squares for `p < n`, minimum-norm when the columns are dependent.
pub fn min_mse(ts: &TrainingSet) -> Result<InterpolatorOutput> {
    let (n, p) = (ts.n, ts.p);
    if p >= n {
        return Err(Error::InvalidParameter(format!(
            "min-MSE is for p < n, got n={n}, p={p}"
        )));
    }
    let qr = HouseholderQr::factor(ts.x().as_slice().to_vec(), n, p);
    let beta_hat = if qr.diag_ratio() > 1e-10 {
        let mut c = ts.observations.clone();
        qr.apply_qt(&mut c);
        qr.solve_r(&c)
    } else {
        let y = nalgebra::DVector::from_column_slice(&ts.observations);
        let sol = ts
            .x()
            .clone()
            .svd(true, true)
            .solve(&y, 1e-12)
            .map_err(|e| Error::NumericalBreakdown(e.to_string()))?;
        sol.as_slice().to_vec()
    };
    let error = beta_hat.iter().zip(&ts.truth.beta_scaled).map(|(a, b)| a - b).collect();
    Ok(InterpolatorOutput::build(ts, beta_hat, error, &ts.observations, None))
}

pub fn sparsify(estimate: &[f64], ts: &TrainingSet) -> Result<Vec<f64>> {
    sparsify_system(estimate, ts.x(), &ts.observations)
}

/// Reduces a feasible point of `X b = y` to at most `n` nonzeros without
/// increasing `||b||_1`. Each round takes `n + 1` support columns, finds a
/// null combination `c`, and moves along `b + lambda c` to the better end of
/// the sign-preserving interval.
pub fn sparsify_system(estimate: &[f64], x: &DMatrix<f64>, y: &[f64]) -> Result<Vec<f64>> {
    let n = x.nrows();
    let mut b = estimate.to_vec();
    let tol = 1e-7 * (1.0 + linalg::norm_inf(y));
    let check = |b: &[f64], round: usize| -> Result<()> {
        let r = linalg::mat_vec(x, b);
        let residual = r.iter().zip(y).fold(0.0f64, |m, (a, c)| m.max((a - c).abs()));
        if residual > tol {
            Err(Error::FeasibilityLost { residual, round })
        } else {
            Ok(())
        }
    };
    check(&b, 0)?;
    let mut round = 0;
    loop {
        let support: Vec<usize> = (0..b.len()).filter(|&i| b[i] != 0.0).collect();
        if support.len() <= n {
            return Ok(b);
        }
        round += 1;
        let set = &support[..n + 1];
        let c = null_combination(x, set);

        let (mut lb, mut lb_idx) = (0.0f64, None);
        let (mut ub, mut ub_idx) = (0.0f64, None);
        for (&i, &ci) in set.iter().zip(&c) {
            if ci == 0.0 {
                continue;
            }
            let t = -b[i] / ci;
            if t < 0.0 && (lb_idx.is_none() || t > lb) {
                lb = t;
                lb_idx = Some(i);
            } else if t > 0.0 && (ub_idx.is_none() || t < ub) {
                ub = t;
                ub_idx = Some(i);
            }
        }
        let moved = |lam: f64| -> Vec<f64> {
            let mut out = b.clone();
            for (&i, &ci) in set.iter().zip(&c) {
                out[i] += lam * ci;
            }
            out
        };
        let (lam, zeroed) = match (lb_idx, ub_idx) {
            (Some(li), Some(ui)) => {
                let (nl, nu) = (linalg::norm1(&moved(lb)), linalg::norm1(&moved(ub)));
                if nl < nu || (nl == nu && li < ui) {
                    (lb, li)
                } else {
                    (ub, ui)
                }
            }
            (Some(li), None) => (lb, li),
            (None, Some(ui)) => (ub, ui),
            (None, None) => {
                return Err(Error::NumericalBreakdown(
                    "null combination vanished on the support".into(),
                ))
            }
        };
        b = moved(lam);
        b[zeroed] = 0.0;
        check(&b, round)?;
    }
}

/// Unit vector `c` with `sum c_k X_{set[k]} ~ 0` (`set.len() = n + 1`): the
/// right singular vector of the smallest singular value.
fn null_combination(x: &DMatrix<f64>, set: &[usize]) -> Vec<f64> {
    let n = x.nrows();
    let k = set.len();
    let mut sub = DMatrix::zeros(k.max(n), k);
    for (c, &j) in set.iter().enumerate() {
        sub.view_mut((0, c), (n, 1)).copy_from_slice(col(x, j));
    }
    let svd = sub.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (imin, _) =
        svd.singular_values.iter().enumerate().fold(
            (0, f64::INFINITY),
            |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
        );
    v_t.row(imin).iter().cloned().collect()
}

/// Minimum l1 norm over basic solutions of `X b = y` using only columns
/// `fixed_zero_prefix..p`, by enumerating every independent column subset
/// of size at most `n`.
pub fn brute_force_l1(x: &DMatrix<f64>, y: &[f64], fixed_zero_prefix: usize) -> Result<f64> {
    let (n, p) = (x.nrows(), x.ncols());
    if n > 4 || p > 8 {
        return Err(Error::Intractable { n, p });
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "y has length {}, X has {n} rows",
            y.len()
        )));
    }
    if y.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let allowed: Vec<usize> = (fixed_zero_prefix.min(p)..p).collect();
    let tol = 1e-9 * (1.0 + linalg::norm_inf(y));
    let mut best: Option<f64> = None;
    for mask in 1u32..(1u32 << allowed.len()) {
        let cols: Vec<usize> = (0..allowed.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| allowed[b])
            .collect();
        if cols.len() > n {
            continue;
        }
        let mut a = Vec::with_capacity(n * cols.len());
        for &j in &cols {
            a.extend_from_slice(col(x, j));
        }
        let qr = HouseholderQr::factor(a.clone(), n, cols.len());
        if qr.diag_ratio() < 1e-12 {
            continue;
        }
        let mut c = y.to_vec();
        qr.apply_qt(&mut c);
        let coef = qr.solve_r(&c);
        let mut fit = vec![0.0; n];
        for (k, &v) in coef.iter().enumerate() {
            linalg::axpy(v, &a[k * n..(k + 1) * n], &mut fit);
        }
        let res = fit.iter().zip(y).fold(0.0f64, |m, (f, t)| m.max((f - t).abs()));
        if res <= tol {
            let l1 = linalg::norm1(&coef);
            best = Some(best.map_or(l1, |b| b.min(l1)));
        }
    }
    best.ok_or(Error::NoFeasibleBasis)
}
