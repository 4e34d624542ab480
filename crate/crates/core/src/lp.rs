//! Dense bounded-variable primal simplex.
//!
//! Problems are stated as `min/max c^T x  s.t.  A x = b,  l <= x <= u` with
//! possibly infinite bounds. The solver keeps an explicit row-major basis
//! inverse updated by rank-one eliminations and rebuilt by Gauss-Jordan
//! every `max(64, rows)` pivots. Phase 1 uses one artificial per row unless
//! a feasible starting basis is supplied.
//!
//! Pricing is Dantzig (largest reduced cost, lowest index on ties). After
//! `degenerate_limit` consecutive zero-length steps the solver switches to
//! Bland's rule until a step makes progress. The ratio test is Harris'
//! two-pass test with a relaxation of `feasibility / 10`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, axpy, col, dot, invert_row_major};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// The equality matrix. `Mirrored(M)` stands for `[M, -M]` and is priced
/// with one product per column of `M`.
#[derive(Clone, Debug)]
pub enum ConstraintMatrix {
    Dense(DMatrix<f64>),
    Mirrored(DMatrix<f64>),
}

impl ConstraintMatrix {
    pub fn rows(&self) -> usize {
        match self {
            ConstraintMatrix::Dense(m) | ConstraintMatrix::Mirrored(m) => m.nrows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            ConstraintMatrix::Dense(m) => m.ncols(),
            ConstraintMatrix::Mirrored(m) => 2 * m.ncols(),
        }
    }

    fn copy_column(&self, j: usize, out: &mut [f64]) {
        match self {
            ConstraintMatrix::Dense(m) => out.copy_from_slice(col(m, j)),
            ConstraintMatrix::Mirrored(m) => {
                let h = m.ncols();
                if j < h {
                    out.copy_from_slice(col(m, j));
                } else {
                    for (o, v) in out.iter_mut().zip(col(m, j - h)) {
                        *o = -v;
                    }
                }
            }
        }
    }

    /// `out[j] = A_j . v` for every column.
    fn transpose_mul(&self, v: &[f64], out: &mut [f64]) {
        match self {
            ConstraintMatrix::Dense(m) => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = dot(col(m, j), v);
                }
            }
            ConstraintMatrix::Mirrored(m) => {
                let h = m.ncols();
                let (pos, neg) = out.split_at_mut(h);
                for j in 0..h {
                    let t = dot(col(m, j), v);
                    pos[j] = t;
                    neg[j] = -t;
                }
            }
        }
    }

    fn mirror(&self, j: usize) -> Option<usize> {
        match self {
            ConstraintMatrix::Dense(_) => None,
            ConstraintMatrix::Mirrored(m) => {
                let h = m.ncols();
                Some(if j < h { j + h } else { j - h })
            }
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ConstraintMatrix::Dense(m) => linalg::mat_vec(m, x),
            ConstraintMatrix::Mirrored(m) => {
                let h = m.ncols();
                let diff: Vec<f64> = (0..h).map(|j| x[j] - x[j + h]).collect();
                linalg::mat_vec(m, &diff)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub matrix: ConstraintMatrix,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub sense: Sense,
}

impl LinearProgram {
    /// `x >= 0` on every variable.
    pub fn nonnegative(objective: Vec<f64>, matrix: ConstraintMatrix, rhs: Vec<f64>, sense: Sense) -> Self {
        let m = matrix.cols();
        LinearProgram {
            objective,
            matrix,
            rhs,
            lower: vec![0.0; m],
            upper: vec![f64::INFINITY; m],
            sense,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (k, m) = (self.matrix.rows(), self.matrix.cols());
        if self.objective.len() != m || self.lower.len() != m || self.upper.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "{m} columns but objective/lower/upper have {}/{}/{}",
                self.objective.len(),
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.rhs.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{k} rows but rhs has {}",
                self.rhs.len()
            )));
        }
        if self.rhs.iter().any(|v| !v.is_finite()) || self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("rhs and objective must be finite".into()));
        }
        for j in 0..m {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::InvalidParameter(format!("bounds of x[{j}] are [{l}, {u}]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: Status,
    pub solution: Vec<f64>,
    pub objective_value: f64,
    /// `y` with `c - A^T y` the reduced costs, in the sign convention of the
    /// stated sense.
    pub dual_multipliers: Vec<f64>,
    pub iterations: usize,
    /// `||A x - b||_inf`, recomputed from the returned solution.
    pub primal_residual: f64,
    /// Primal objective minus the dual bound implied by `dual_multipliers`.
    pub duality_gap: f64,
    /// Largest violation of dual feasibility in the reduced costs.
    pub dual_infeasibility: f64,
    /// Structural variable basic in each row (`None` for a redundant row).
    pub basis: Vec<Option<usize>>,
    /// Rows found linearly dependent during phase 1.
    pub redundant_rows: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub feasibility: f64,
    pub duality_gap: f64,
    pub pivot: f64,
    pub optimality: f64,
    pub max_condition: f64,
    pub degenerate_limit: usize,
    pub max_iterations: Option<usize>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feasibility: 1e-8,
            duality_gap: 1e-7,
            pivot: 1e-10,
            optimality: 1e-9,
            max_condition: 1e14,
            degenerate_limit: 100,
            max_iterations: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub tolerances: Tolerances,
    /// One structural variable per row. Used when it gives a nonsingular,
    /// primal-feasible basis; otherwise phase 1 runs as usual. For a
    /// mirrored matrix a basic variable with negative value is swapped for
    /// its mirror.
    pub initial_basis: Option<Vec<usize>>,
}

pub fn lp_solve(lp: &LinearProgram) -> Result<SolveResult> {
    lp_solve_with(lp, &SolveOptions::default())
}

pub fn lp_solve_with(lp: &LinearProgram, opts: &SolveOptions) -> Result<SolveResult> {
    lp.validate()?;
    Simplex::new(lp, opts.tolerances).solve(opts.initial_basis.as_deref())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    Free,
}

enum Step {
    Flip,
    Pivot { row: usize, theta: f64, to_upper: bool },
    Unbounded,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Simplex<'a> {
    lp: &'a LinearProgram,
    tol: Tolerances,
    k: usize,
    m: usize,
    art_sign: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
    aq: Vec<f64>,
    alpha: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
    since_refactor: usize,
    refactor_every: usize,
    degenerate_run: usize,
    bland: bool,
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a LinearProgram, tol: Tolerances) -> Self {
        let (k, m) = (lp.matrix.rows(), lp.matrix.cols());
        let mut lo = lp.lower.clone();
        let mut up = lp.upper.clone();
        lo.extend(std::iter::repeat_n(0.0, k));
        up.extend(std::iter::repeat_n(0.0, k));
        let mut state = Vec::with_capacity(m + k);
        let mut x = Vec::with_capacity(m + k);
        for j in 0..m {
            let (st, v) = if lo[j].is_finite() {
                (State::Lower, lo[j])
            } else if up[j].is_finite() {
                (State::Upper, up[j])
            } else {
                (State::Free, 0.0)
            };
            state.push(st);
            x.push(v);
        }
        state.extend(std::iter::repeat_n(State::Lower, k));
        x.extend(std::iter::repeat_n(0.0, k));
        Simplex {
            lp,
            tol,
            k,
            m,
            art_sign: vec![1.0; k],
            lo,
            up,
            cost: vec![0.0; m + k],
            x,
            state,
            basis: Vec::new(),
            binv: vec![0.0; k * k],
            y: vec![0.0; k],
            d: vec![0.0; m + k],
            aq: vec![0.0; k],
            alpha: vec![0.0; k],
            iterations: 0,
            max_iterations: tol.max_iterations.unwrap_or(1000 + 50 * (m + k)),
            since_refactor: 0,
            refactor_every: k.max(64),
            degenerate_run: 0,
            bland: false,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.m
    }

    fn load_column(&mut self, j: usize) {
        if j < self.m {
            self.lp.matrix.copy_column(j, &mut self.aq);
        } else {
            self.aq.fill(0.0);
            self.aq[j - self.m] = self.art_sign[j - self.m];
        }
    }

    fn solve(mut self, hint: Option<&[usize]>) -> Result<SolveResult> {
        let internal_cost: Vec<f64> = match self.lp.sense {
            Sense::Minimize => self.lp.objective.clone(),
            Sense::Maximize => self.lp.objective.iter().map(|c| -c).collect(),
        };
        let warm = match hint {
            Some(h) => self.try_hint(h)?,
            None => false,
        };
        let mut redundant = 0;
        if !warm {
            self.artificial_start();
            self.cost[self.m..].fill(1.0);
            self.refresh_duals();
            match self.run_phase()? {
                PhaseEnd::Optimal => {}
                PhaseEnd::Unbounded => return Err(Error::NumericalBreakdown("phase 1 reported unbounded".into())),
            }
            let infeasibility: f64 = (0..self.k)
                .filter(|&r| self.is_artificial(self.basis[r]))
                .map(|r| self.x[self.basis[r]].abs())
                .sum();
            let scale = 1.0 + linalg::norm2(&self.lp.rhs);
            if infeasibility > self.tol.feasibility * scale {
                return Ok(self.finish(Status::Infeasible, 0));
            }
            redundant = self.drive_out_artificials()?;
        }
        self.cost[..self.m].copy_from_slice(&internal_cost);
        self.cost[self.m..].fill(0.0);
        self.degenerate_run = 0;
        self.bland = false;
        self.refresh_duals();
        let status = match self.run_phase()? {
            PhaseEnd::Optimal => Status::Optimal,
            PhaseEnd::Unbounded => Status::Unbounded,
        };
        Ok(self.finish(status, redundant))
    }

    fn artificial_start(&mut self) {
        let mut r = self.lp.rhs.clone();
        for j in 0..self.m {
            if self.x[j] != 0.0 {
                self.load_column(j);
                axpy(-self.x[j], &self.aq.clone(), &mut r);
            }
        }
        self.basis = (self.m..self.m + self.k).collect();
        self.binv.fill(0.0);
        for i in 0..self.k {
            let sign = if r[i] < 0.0 { -1.0 } else { 1.0 };
            self.art_sign[i] = sign;
            self.binv[i * self.k + i] = sign;
            let a = self.m + i;
            self.up[a] = f64::INFINITY;
            self.state[a] = State::Basic;
            self.x[a] = r[i].abs();
        }
        self.since_refactor = 0;
    }

    fn try_hint(&mut self, hint: &[usize]) -> Result<bool> {
        if hint.len() != self.k || hint.iter().any(|&j| j >= self.m) {
            return Err(Error::DimensionMismatch(format!(
                "initial basis must list {} structural variables",
                self.k
            )));
        }
        let mut seen = vec![false; self.m];
        for &j in hint {
            if seen[j] {
                return Ok(false);
            }
            seen[j] = true;
        }
        self.basis = hint.to_vec();
        for &j in hint {
            self.state[j] = State::Basic;
        }
        if self.reinvert().is_err() {
            self.reset_hint(hint);
            return Ok(false);
        }
        for r in 0..self.k {
            let j = self.basis[r];
            if self.x[j] >= self.lo[j] - self.tol.feasibility {
                continue;
            }
            if let Some(mj) = self.lp.matrix.mirror(j) {
                if self.state[mj] != State::Basic && self.lo[mj] == 0.0 && self.lo[j] == 0.0 {
                    self.state[j] = State::Lower;
                    self.x[mj] = -self.x[j];
                    self.x[j] = 0.0;
                    self.state[mj] = State::Basic;
                    self.basis[r] = mj;
                    for v in &mut self.binv[r * self.k..(r + 1) * self.k] {
                        *v = -*v;
                    }
                }
            }
        }
        let feasible = (0..self.k).all(|r| {
            let j = self.basis[r];
            self.x[j] >= self.lo[j] - self.tol.feasibility && self.x[j] <= self.up[j] + self.tol.feasibility
        });
        if !feasible {
            self.reset_hint(hint);
        }
        Ok(feasible)
    }

    fn reset_hint(&mut self, hint: &[usize]) {
        for &j in hint.iter().chain(self.basis.clone().iter()) {
            if j < self.m {
                let (st, v) = if self.lo[j].is_finite() {
                    (State::Lower, self.lo[j])
                } else if self.up[j].is_finite() {
                    (State::Upper, self.up[j])
                } else {
                    (State::Free, 0.0)
                };
                self.state[j] = st;
                self.x[j] = v;
            }
        }
        self.basis.clear();
    }

    /// Rebuilds the basis inverse, the basic values and the duals.
    fn reinvert(&mut self) -> Result<()> {
        let k = self.k;
        let mut bmat = vec![0.0; k * k];
        for r in 0..k {
            self.load_column(self.basis[r]);
            for i in 0..k {
                bmat[i * k + r] = self.aq[i];
            }
        }
        let cond =
            invert_row_major(&mut bmat, k, 1e-14).ok_or_else(|| Error::NumericalBreakdown("singular basis".into()))?;
        if !(cond <= self.tol.max_condition) {
            return Err(Error::NumericalBreakdown(format!(
                "basis condition estimate {cond:.3e}"
            )));
        }
        self.binv = bmat;
        self.since_refactor = 0;
        self.refresh_primal();
        self.refresh_duals();
        Ok(())
    }

    fn refresh_primal(&mut self) {
        let mut r = self.lp.rhs.clone();
        for j in 0..self.m + self.k {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                self.load_column(j);
                let xj = self.x[j];
                let aq = std::mem::take(&mut self.aq);
                axpy(-xj, &aq, &mut r);
                self.aq = aq;
            }
        }
        for row in 0..self.k {
            let v = dot(&self.binv[row * self.k..(row + 1) * self.k], &r);
            self.x[self.basis[row]] = v;
        }
    }

    fn refresh_duals(&mut self) {
        self.y.fill(0.0);
        for r in 0..self.k {
            let c = self.cost[self.basis[r]];
            if c != 0.0 {
                axpy(c, &self.binv[r * self.k..(r + 1) * self.k], &mut self.y);
            }
        }
    }

    fn price(&mut self) {
        let m = self.m;
        self.lp.matrix.transpose_mul(&self.y, &mut self.d[..m]);
        for j in 0..m {
            self.d[j] = self.cost[j] - self.d[j];
        }
        for i in 0..self.k {
            self.d[m + i] = self.cost[m + i] - self.art_sign[i] * self.y[i];
        }
    }

    /// Entering variable and its direction (+1 increase, -1 decrease).
    fn choose_entering(&self) -> Option<(usize, f64)> {
        let tol = self.tol.optimality;
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.m + self.k {
            let dj = self.d[j];
            let dir = match self.state[j] {
                State::Basic => continue,
                _ if self.lo[j] == self.up[j] => continue,
                State::Lower if dj < -tol => 1.0,
                State::Upper if dj > tol => -1.0,
                State::Free if dj.abs() > tol => -dj.signum(),
                _ => continue,
            };
            if self.bland {
                return Some((j, dir));
            }
            if dj.abs() > best_score {
                best_score = dj.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    fn ratio_test(&self, q: usize, dir: f64) -> Step {
        let relax = self.tol.feasibility * 0.1;
        let piv = self.tol.pivot;
        let range = self.up[q] - self.lo[q];
        let limit = |i: usize, slack_extra: f64| -> Option<(f64, bool)> {
            let a = self.alpha[i];
            if a.abs() <= piv {
                return None;
            }
            let j = self.basis[i];
            let rate = -dir * a;
            if rate < 0.0 {
                let l = self.lo[j];
                l.is_finite().then(|| ((self.x[j] - l + slack_extra) / -rate, false))
            } else {
                let u = self.up[j];
                u.is_finite().then(|| ((u - self.x[j] + slack_extra) / rate, true))
            }
        };
        let chosen = if self.bland {
            let mut best: Option<(usize, f64, bool)> = None;
            for i in 0..self.k {
                if let Some((t, up)) = limit(i, 0.0) {
                    let t = t.max(0.0);
                    let better = match best {
                        None => true,
                        Some((bi, bt, _)) => t < bt || (t == bt && self.basis[i] < self.basis[bi]),
                    };
                    if better {
                        best = Some((i, t, up));
                    }
                }
            }
            best
        } else {
            let mut theta_max = f64::INFINITY;
            for i in 0..self.k {
                if let Some((t, _)) = limit(i, relax) {
                    theta_max = theta_max.min(t);
                }
            }
            let mut best: Option<(usize, f64, bool)> = None;
            if theta_max.is_finite() {
                let mut best_abs = 0.0;
                for i in 0..self.k {
                    if let Some((t, up)) = limit(i, 0.0) {
                        if t <= theta_max && self.alpha[i].abs() > best_abs {
                            best_abs = self.alpha[i].abs();
                            best = Some((i, t.max(0.0), up));
                        }
                    }
                }
            }
            best
        };
        match chosen {
            Some((_, theta, _)) if range <= theta => Step::Flip,
            Some((row, theta, to_upper)) => Step::Pivot { row, theta, to_upper },
            None if range.is_finite() => Step::Flip,
            None => Step::Unbounded,
        }
    }

    fn run_phase(&mut self) -> Result<PhaseEnd> {
        let mut confirmed = false;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::IterationLimit(self.max_iterations));
            }
            if self.since_refactor >= self.refactor_every {
                self.reinvert()?;
            }
            self.price();
            let Some((q, dir)) = self.choose_entering() else {
                if self.since_refactor == 0 || confirmed {
                    return Ok(PhaseEnd::Optimal);
                }
                self.reinvert()?;
                confirmed = true;
                continue;
            };
            confirmed = false;
            self.load_column(q);
            for i in 0..self.k {
                self.alpha[i] = dot(&self.binv[i * self.k..(i + 1) * self.k], &self.aq);
            }
            match self.ratio_test(q, dir) {
                Step::Unbounded => {
                    if self.since_refactor > 0 {
                        self.reinvert()?;
                        continue;
                    }
                    return Ok(PhaseEnd::Unbounded);
                }
                Step::Flip => {
                    let theta = self.up[q] - self.lo[q];
                    self.move_basics(theta * dir);
                    let (st, v) = if dir > 0.0 {
                        (State::Upper, self.up[q])
                    } else {
                        (State::Lower, self.lo[q])
                    };
                    self.state[q] = st;
                    self.x[q] = v;
                    self.note_progress(theta);
                }
                Step::Pivot { row, theta, to_upper } => {
                    let amax = linalg::norm_inf(&self.alpha);
                    if self.alpha[row].abs() < 1e-9 * amax && self.since_refactor > 0 {
                        self.reinvert()?;
                        continue;
                    }
                    self.move_basics(theta * dir);
                    self.x[q] += theta * dir;
                    self.pivot(q, row, to_upper);
                    self.note_progress(theta);
                }
            }
            self.iterations += 1;
        }
    }

    fn move_basics(&mut self, delta: f64) {
        if delta == 0.0 {
            return;
        }
        for i in 0..self.k {
            let j = self.basis[i];
            self.x[j] -= delta * self.alpha[i];
        }
    }

    fn note_progress(&mut self, theta: f64) {
        if theta <= 1e-12 {
            self.degenerate_run += 1;
            if self.degenerate_run >= self.tol.degenerate_limit {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = false;
        }
    }

    /// Basis change: `q` enters at `row`; the leaving variable is parked on
    /// the bound it reached.
    fn pivot(&mut self, q: usize, row: usize, to_upper: bool) {
        let k = self.k;
        let leaving = self.basis[row];
        let dq = self.d[q];
        let ar = self.alpha[row];
        let scale = dq / ar;
        axpy(scale, &self.binv[row * k..(row + 1) * k], &mut self.y);

        let inv = 1.0 / ar;
        for v in &mut self.binv[row * k..(row + 1) * k] {
            *v *= inv;
        }
        let pivot_row = self.binv[row * k..(row + 1) * k].to_vec();
        for i in 0..k {
            if i != row && self.alpha[i] != 0.0 {
                let f = self.alpha[i];
                axpy(-f, &pivot_row, &mut self.binv[i * k..(i + 1) * k]);
            }
        }

        if self.is_artificial(leaving) {
            self.up[leaving] = 0.0;
            self.state[leaving] = State::Lower;
            self.x[leaving] = 0.0;
        } else if self.lo[leaving] == f64::NEG_INFINITY && self.up[leaving] == f64::INFINITY {
            self.state[leaving] = State::Free;
        } else if to_upper {
            self.state[leaving] = State::Upper;
            self.x[leaving] = self.up[leaving];
        } else {
            self.state[leaving] = State::Lower;
            self.x[leaving] = self.lo[leaving];
        }
        self.basis[row] = q;
        self.state[q] = State::Basic;
        self.since_refactor += 1;
    }

    /// Pivots basic artificials out where some structural column allows it.
    /// Returns the number of rows left with an artificial (dependent rows).
    fn drive_out_artificials(&mut self) -> Result<usize> {
        for j in self.m..self.m + self.k {
            if self.state[j] != State::Basic {
                self.up[j] = 0.0;
            }
        }
        let mut redundant = 0;
        let mut w = vec![0.0; self.m];
        for row in 0..self.k {
            let a = self.basis[row];
            if !self.is_artificial(a) {
                continue;
            }
            self.up[a] = 0.0;
            let rho = self.binv[row * self.k..(row + 1) * self.k].to_vec();
            self.lp.matrix.transpose_mul(&rho, &mut w);
            let scale = linalg::norm_inf(&rho).max(1.0);
            let mut best: Option<usize> = None;
            let mut best_abs = self.tol.pivot.max(1e-9) * scale;
            for j in 0..self.m {
                if self.state[j] != State::Basic && self.lo[j] != self.up[j] && w[j].abs() > best_abs {
                    best_abs = w[j].abs();
                    best = Some(j);
                }
            }
            match best {
                Some(q) => {
                    self.load_column(q);
                    for i in 0..self.k {
                        self.alpha[i] = dot(&self.binv[i * self.k..(i + 1) * self.k], &self.aq);
                    }
                    self.d[q] = 0.0;
                    self.pivot(q, row, false);
                    self.iterations += 1;
                }
                None => redundant += 1,
            }
        }
        self.reinvert()?;
        Ok(redundant)
    }

    fn finish(mut self, status: Status, redundant_rows: usize) -> SolveResult {
        if status == Status::Optimal {
            self.refresh_duals();
            self.price();
        }
        let m = self.m;
        let solution = self.x[..m].to_vec();
        let ax = self.lp.matrix.mul(&solution);
        let primal_residual = ax
            .iter()
            .zip(&self.lp.rhs)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        let sign = match self.lp.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let primal: f64 = self.lp.objective.iter().zip(&solution).map(|(c, x)| c * x).sum();

        let (mut duality_gap, mut dual_infeasibility) = (f64::NAN, f64::NAN);
        if status == Status::Optimal {
            let mut bound = dot(&self.lp.rhs, &self.y);
            let mut infeas = 0.0f64;
            for j in 0..m {
                let dj = self.d[j];
                if dj > 0.0 {
                    if self.lo[j].is_finite() {
                        bound += dj * self.lo[j];
                    } else {
                        infeas = infeas.max(dj);
                    }
                } else if dj < 0.0 {
                    if self.up[j].is_finite() {
                        bound += dj * self.up[j];
                    } else {
                        infeas = infeas.max(-dj);
                    }
                }
            }
            duality_gap = (sign * primal - bound).abs();
            dual_infeasibility = infeas;
        }
        let objective_value = match status {
            Status::Optimal => primal,
            Status::Unbounded => sign * f64::NEG_INFINITY,
            Status::Infeasible => f64::NAN,
        };
        let basis = self.basis.iter().map(|&j| (j < m).then_some(j)).collect();
        SolveResult {
            status,
            solution,
            objective_value,
            dual_multipliers: self.y.iter().map(|v| sign * v).collect(),
            iterations: self.iterations,
            primal_residual,
            duality_gap,
            dual_infeasibility,
            basis,
            redundant_rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(k: usize, m: usize, entries: &[f64]) -> ConstraintMatrix {
        ConstraintMatrix::Dense(DMatrix::from_row_slice(k, m, entries))
    }

    #[test]
    fn single_equality() {
        let lp = LinearProgram::nonnegative(vec![1.0], dense(1, 1, &[1.0]), vec![1.0], Sense::Minimize);
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.solution[0] - 1.0).abs() < 1e-12);
        assert!((r.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_bounds_on_free_variable() {
        // max t  s.t.  t - u = 1, t + v = -1, u, v >= 0: needs t >= 1 and t <= -1.
        let mut lp = LinearProgram::nonnegative(
            vec![1.0, 0.0, 0.0],
            dense(2, 3, &[1.0, -1.0, 0.0, 1.0, 0.0, 1.0]),
            vec![1.0, -1.0],
            Sense::Maximize,
        );
        lp.lower[0] = f64::NEG_INFINITY;
        assert_eq!(lp_solve(&lp).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn two_upper_limits_on_free_variable() {
        // max t s.t. t <= 1, t <= -1 as slack equalities: t = -1.
        let mut lp = LinearProgram::nonnegative(
            vec![1.0, 0.0, 0.0],
            dense(2, 3, &[1.0, 1.0, 0.0, 1.0, 0.0, 1.0]),
            vec![1.0, -1.0],
            Sense::Maximize,
        );
        lp.lower[0] = f64::NEG_INFINITY;
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.objective_value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_ray() {
        // min -x s.t. x - y = 0
        let lp = LinearProgram::nonnegative(vec![-1.0, 0.0], dense(1, 2, &[1.0, -1.0]), vec![0.0], Sense::Minimize);
        assert_eq!(lp_solve(&lp).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn boxed_variables_flip() {
        // max x + y s.t. x + y + z = 10, x, y in [0, 3].
        let mut lp = LinearProgram::nonnegative(
            vec![1.0, 1.0, 0.0],
            dense(1, 3, &[1.0, 1.0, 1.0]),
            vec![10.0],
            Sense::Maximize,
        );
        lp.upper[0] = 3.0;
        lp.upper[1] = 3.0;
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.objective_value - 6.0).abs() < 1e-12);
        assert!(r.duality_gap < 1e-12);
    }

    #[test]
    fn redundant_row_reported() {
        // Second row is twice the first.
        let lp = LinearProgram::nonnegative(
            vec![1.0, 2.0],
            dense(2, 2, &[1.0, 1.0, 2.0, 2.0]),
            vec![1.0, 2.0],
            Sense::Minimize,
        );
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.redundant_rows, 1);
        assert!((r.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mirrored_matches_dense() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.5, -0.3, 0.2, 1.0, 0.7]);
        let mut full = DMatrix::zeros(2, 6);
        full.columns_mut(0, 3).copy_from(&m);
        full.columns_mut(3, 3).copy_from(&(-&m));
        let rhs = vec![0.4, -0.9];
        let a = lp_solve(&LinearProgram::nonnegative(
            vec![1.0; 6],
            ConstraintMatrix::Mirrored(m),
            rhs.clone(),
            Sense::Minimize,
        ))
        .unwrap();
        let b = lp_solve(&LinearProgram::nonnegative(
            vec![1.0; 6],
            ConstraintMatrix::Dense(full),
            rhs,
            Sense::Minimize,
        ))
        .unwrap();
        assert!((a.objective_value - b.objective_value).abs() < 1e-12);
    }

    #[test]
    fn hint_with_wrong_signs_is_repaired() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.5, 0.0, 1.0, 0.5]);
        let lp = LinearProgram::nonnegative(
            vec![1.0; 6],
            ConstraintMatrix::Mirrored(m),
            vec![-1.0, 2.0],
            Sense::Minimize,
        );
        let opts = SolveOptions {
            initial_basis: Some(vec![0, 1]),
            ..Default::default()
        };
        let r = lp_solve_with(&lp, &opts).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.objective_value - 3.0).abs() < 1e-12);
        assert!(r.primal_residual < 1e-12);
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        let lp = LinearProgram::nonnegative(vec![1.0], dense(1, 2, &[1.0, 1.0]), vec![1.0], Sense::Minimize);
        assert!(matches!(lp_solve(&lp), Err(Error::DimensionMismatch(_))));
    }
}
