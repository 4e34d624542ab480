//! Closed-form and empirical bounds on `||w^I||_1`, `||w^BP||_{1,2}` and `M`.
//!
//! Every bound is evaluated whatever the regime; `regime_ok` records whether
//! the stated `(n, p, s)` preconditions hold. Bounds scaled by the noise are
//! returned in absolute units (already multiplied by `||eps||_2`).

use std::collections::BTreeMap;
use std::f64::consts::{E, PI, SQRT_2};
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::incoherence::k_factor;
use crate::linalg::{col, norm2};
use crate::lp::{self, ConstraintMatrix, LinearProgram, Sense, Status};
use crate::model::TrainingSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundId {
    MainUbWbp2,
    FloorUbWbp2,
    LbWbp2,
    Prop1UbWbp1,
    Prop2UbWbp2,
    Cor3UbWbp2,
    Prop4UbWi1,
    Prop4dUbWi1,
    Prop5UbM,
    LbM,
    LbWi1,
    UbWbp1,
    LbWbp1,
    L2ExpectedSqError,
    EmpLbWi1B1,
    EmpUbWi1B5n,
    EmpiricalUbWi1Lp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Upper,
    Lower,
    /// An expected value rather than a high-probability bound.
    Expectation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    WiL1,
    WbpL1,
    WbpL2,
    M,
    /// Squared model error of the min-l2 interpolator.
    Wl2SqError,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    ClosedForm,
    EmpiricalLp,
    EmpiricalVector,
}

impl BoundId {
    pub const ALL: [BoundId; 17] = [
        BoundId::MainUbWbp2,
        BoundId::FloorUbWbp2,
        BoundId::LbWbp2,
        BoundId::Prop1UbWbp1,
        BoundId::Prop2UbWbp2,
        BoundId::Cor3UbWbp2,
        BoundId::Prop4UbWi1,
        BoundId::Prop4dUbWi1,
        BoundId::Prop5UbM,
        BoundId::LbM,
        BoundId::LbWi1,
        BoundId::UbWbp1,
        BoundId::LbWbp1,
        BoundId::L2ExpectedSqError,
        BoundId::EmpLbWi1B1,
        BoundId::EmpUbWi1B5n,
        BoundId::EmpiricalUbWi1Lp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::MainUbWbp2 => "main_ub_wBP2",
            BoundId::FloorUbWbp2 => "floor_ub_wBP2",
            BoundId::LbWbp2 => "lb_wBP2",
            BoundId::Prop1UbWbp1 => "prop1_ub_wBP1",
            BoundId::Prop2UbWbp2 => "prop2_ub_wBP2",
            BoundId::Cor3UbWbp2 => "cor3_ub_wBP2",
            BoundId::Prop4UbWi1 => "prop4_ub_wI1",
            BoundId::Prop4dUbWi1 => "prop4d_ub_wI1",
            BoundId::Prop5UbM => "prop5_ub_M",
            BoundId::LbM => "lb_M",
            BoundId::LbWi1 => "lb_wI1",
            BoundId::UbWbp1 => "ub_wBP1",
            BoundId::LbWbp1 => "lb_wBP1",
            BoundId::L2ExpectedSqError => "l2_expected_sq_error",
            BoundId::EmpLbWi1B1 => "emp_lb_wI1_B1",
            BoundId::EmpUbWi1B5n => "emp_ub_wI1_B5n",
            BoundId::EmpiricalUbWi1Lp => "empirical_ub_wI1_lp",
        }
    }

    pub fn parse(name: &str) -> Option<BoundId> {
        BoundId::ALL.into_iter().find(|b| b.as_str() == name)
    }

    pub fn kind(self) -> Kind {
        use BoundId::*;
        match self {
            LbWbp2 | LbM | LbWi1 | LbWbp1 | EmpLbWi1B1 => Kind::Lower,
            L2ExpectedSqError => Kind::Expectation,
            _ => Kind::Upper,
        }
    }

    pub fn target(self) -> Target {
        use BoundId::*;
        match self {
            MainUbWbp2 | FloorUbWbp2 | LbWbp2 | Prop2UbWbp2 | Cor3UbWbp2 => Target::WbpL2,
            Prop1UbWbp1 | UbWbp1 | LbWbp1 => Target::WbpL1,
            Prop4UbWi1 | Prop4dUbWi1 | LbWi1 | EmpLbWi1B1 | EmpUbWi1B5n | EmpiricalUbWi1Lp => Target::WiL1,
            Prop5UbM | LbM => Target::M,
            L2ExpectedSqError => Target::Wl2SqError,
        }
    }

    pub fn source(self) -> Source {
        match self {
            BoundId::EmpLbWi1B1 | BoundId::EmpUbWi1B5n => Source::EmpiricalVector,
            BoundId::EmpiricalUbWi1Lp => Source::EmpiricalLp,
            _ => Source::ClosedForm,
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `C = (1/5)(1 - 1/sqrt(e)) sqrt(2/pi)`.
pub fn constant_c() -> f64 {
    0.2 * (1.0 - 1.0 / E.sqrt()) * (2.0 / PI).sqrt()
}

/// `floor(exp(n / (1792 s^2)))`, the width at which the BP upper bound
/// bottoms out. Infinite when it overflows.
pub fn descent_floor_p(n: usize, s: usize) -> f64 {
    (n as f64 / (1792.0 * (s * s) as f64)).exp().floor()
}

/// Symbols a bound may read. Missing ones give [`Error::MissingParam`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundParams {
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub s: Option<usize>,
    pub eps_norm: Option<f64>,
    pub m: Option<f64>,
    pub wi_l1: Option<f64>,
    pub wbp_l1: Option<f64>,
    /// `B_(1)^T (-eps)`
    pub b_first: Option<f64>,
    /// `B_(q)^T (-eps)`
    pub b_q: Option<f64>,
    pub q: Option<usize>,
    pub beta_norm: Option<f64>,
    pub sigma: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundValue {
    Finite(f64),
    Unbounded,
}

impl BoundValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            BoundValue::Finite(v) => Some(v),
            BoundValue::Unbounded => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerEntry {
    pub id: BoundId,
    pub value: BoundValue,
    pub kind: Kind,
    pub target: Target,
    pub source: Source,
    pub regime_ok: bool,
}

impl LedgerEntry {
    fn new(id: BoundId, value: BoundValue, regime_ok: bool) -> Self {
        LedgerEntry {
            id,
            value,
            kind: id.kind(),
            target: id.target(),
            source: id.source(),
            regime_ok,
        }
    }
}

struct Reader<'a> {
    id: BoundId,
    p: &'a BoundParams,
}

impl Reader<'_> {
    fn need<T: Copy>(&self, v: Option<T>, name: &'static str) -> Result<T> {
        v.ok_or(Error::MissingParam {
            bound: self.id.as_str(),
            param: name,
        })
    }
    fn n(&self) -> Result<f64> {
        self.need(self.p.n, "n").map(|v| v as f64)
    }
    fn s(&self) -> Result<usize> {
        self.need(self.p.s, "s")
    }
    fn eps(&self) -> Result<f64> {
        self.need(self.p.eps_norm, "eps_norm")
    }
    fn m(&self) -> Result<f64> {
        self.need(self.p.m, "M")
    }
    fn ln_p(&self) -> Result<f64> {
        let p = self.need(self.p.p, "p")?;
        let l = (p as f64).ln();
        if l > 0.0 {
            Ok(l)
        } else {
            Err(self.domain(format!("ln p = {l} is not positive")))
        }
    }
    fn k(&self) -> Result<f64> {
        let k = k_factor(self.m()?, self.s()?)?;
        if k > 0.0 {
            Ok(k)
        } else {
            Err(self.domain(format!("K = {k} is not positive")))
        }
    }
    fn domain(&self, reason: String) -> Error {
        Error::DomainError {
            bound: self.id.as_str(),
            reason,
        }
    }
}

/// Both `s <= sqrt(n / (7168 ln 16n))` and `(16n)^4 <= p <= exp(n / (1792 s^2))`.
fn main_regime(n: f64, ln_p: f64, s: usize) -> bool {
    let s = s as f64;
    let ln16n = (16.0 * n).ln();
    s <= (n / (7168.0 * ln16n)).sqrt() && 4.0 * ln16n <= ln_p && ln_p <= n / (1792.0 * s * s)
}

/// `p <= e^{(n-1)/16} / n` and `n >= 17`.
fn lower_regime(n: f64, ln_p: f64) -> bool {
    n >= 17.0 && ln_p <= (n - 1.0) / 16.0 - n.ln()
}

pub fn eval_bound(id: BoundId, params: &BoundParams) -> Result<LedgerEntry> {
    let r = Reader { id, p: params };
    let fin = |v: f64, ok: bool| Ok(LedgerEntry::new(id, BoundValue::Finite(v), ok));
    match id {
        BoundId::MainUbWbp2 => {
            let (n, ln_p, s, eps) = (r.n()?, r.ln_p()?, r.s()?, r.eps()?);
            fin((2.0 + 8.0 * (7.0 * n / ln_p).powf(0.25)) * eps, main_regime(n, ln_p, s))
        }
        BoundId::FloorUbWbp2 => {
            let (n, s, eps) = (r.n()?, r.s()?, r.eps()?);
            let ok = s >= 1 && (s as f64) <= (n / (7168.0 * (16.0 * n).ln())).sqrt();
            fin((2.0 + 32.0 * 14f64.sqrt() * (s as f64).sqrt()) * eps, ok)
        }
        BoundId::LbWbp2 => {
            let (n, ln_p, s, eps) = (r.n()?, r.ln_p()?, r.s()?, r.eps()?);
            let ok = lower_regime(n, ln_p) && n >= s as f64;
            fin((1.0 / (3.0 * SQRT_2)) * (1.0 / ln_p).sqrt() * eps, ok)
        }
        BoundId::Prop1UbWbp1 => {
            let (k, m, wi, eps) = (r.k()?, r.m()?, r.need(params.wi_l1, "wi_l1")?, r.eps()?);
            fin((1.0 + 8.0 / k + 2.0 / k.sqrt()) * wi + 2.0 * eps / (k * m).sqrt(), true)
        }
        BoundId::Prop2UbWbp2 => {
            let (eps, m, wbp) = (r.eps()?, r.m()?, r.need(params.wbp_l1, "wbp_l1")?);
            fin(eps + m.sqrt() * wbp, true)
        }
        BoundId::Cor3UbWbp2 => {
            let (k, m, wi, eps) = (r.k()?, r.m()?, r.need(params.wi_l1, "wi_l1")?, r.eps()?);
            let rk = k.sqrt();
            fin(
                (1.0 + 2.0 / rk) * eps + m.sqrt() * (1.0 + 8.0 / k + 2.0 / rk) * wi,
                true,
            )
        }
        BoundId::Prop4UbWi1 => {
            let (n, ln_p, eps) = (r.n()?, r.ln_p()?, r.eps()?);
            let ok = n >= 100.0 && ln_p >= 4.0 * (16.0 * n).ln();
            fin(eps * (1.0 + 1.5 * n / ln_p).sqrt(), ok)
        }
        BoundId::Prop4dUbWi1 => {
            let (n, p, s, eps) = (r.n()?, r.need(params.p, "p")?, r.s()?, r.eps()?);
            if p <= s {
                return Err(r.domain(format!("p - s = {} is not positive", p as i64 - s as i64)));
            }
            let ps = (p - s) as f64;
            let c = constant_c();
            let ln_arg = (c * ps / n).ln();
            if ln_arg <= 0.5 {
                return Err(r.domain(format!("sqrt(2 ln(C(p-s)/n)) - 1 <= 0 (ln term {ln_arg:.4})")));
            }
            let den = (2.0 * ln_arg).sqrt() - 1.0;
            let ratio = (1.0 + (n + SQRT_2 * (n - 1.0).max(0.0).sqrt()) / (den * den)).sqrt();
            fin(eps * ratio, ps >= n * (9.0f64 / 8.0).exp() / c)
        }
        BoundId::Prop5UbM => {
            let (n, ln_p) = (r.n()?, r.ln_p()?);
            fin(2.0 * 7f64.sqrt() * (ln_p / n).sqrt(), ln_p <= n / 36.0)
        }
        BoundId::LbM => {
            let (n, ln_p) = (r.n()?, r.ln_p()?);
            let p = r.need(params.p, "p")?;
            let half = (p / 2) as f64;
            let ok = p as f64 > n && half > 1.0 && half.ln() < (2.0 - 3f64.sqrt()) / 4.0 * n;
            fin(SQRT_2 / 8.0 * (ln_p / n).sqrt(), ok)
        }
        BoundId::LbWi1 => {
            let (n, ln_p, eps) = (r.n()?, r.ln_p()?, r.eps()?);
            fin(eps * (1.0 + n / (9.0 * ln_p)).sqrt(), lower_regime(n, ln_p))
        }
        BoundId::UbWbp1 => {
            let (n, ln_p, s, eps) = (r.n()?, r.ln_p()?, r.s()?, r.eps()?);
            let c = 4.0 * SQRT_2 + (1.0 / (2.0 * 7f64.sqrt())).sqrt();
            fin(c * (n / ln_p).sqrt() * eps, main_regime(n, ln_p, s))
        }
        BoundId::LbWbp1 => {
            let (n, ln_p, eps) = (r.n()?, r.ln_p()?, r.eps()?);
            let ok = lower_regime(n, ln_p) && params.s.is_none_or(|s| n >= s as f64);
            fin((n / ln_p).sqrt() / 3.0 * eps, ok)
        }
        BoundId::L2ExpectedSqError => {
            let (n, p) = (r.n()?, r.need(params.p, "p")? as f64);
            let (b, sigma) = (r.need(params.beta_norm, "beta_norm")?, r.need(params.sigma, "sigma")?);
            if p < n + 2.0 {
                return Err(r.domain(format!("needs p >= n + 2, got n={n}, p={p}")));
            }
            fin(b * b * (1.0 - n / p) + sigma * sigma * n / (p - n - 1.0), true)
        }
        BoundId::EmpLbWi1B1 => {
            let (eps, b1) = (r.eps()?, r.need(params.b_first, "b_first")?);
            if b1 <= 0.0 {
                return Err(r.domain(format!("B_(1)^T(-eps) = {b1} is not positive")));
            }
            fin(eps * eps / b1, true)
        }
        BoundId::EmpUbWi1B5n => {
            let (eps, bq) = (r.eps()?, r.need(params.b_q, "b_q")?);
            if bq <= 0.0 {
                return Err(r.domain(format!("B_(q)^T(-eps) = {bq} is not positive")));
            }
            let ok = match (params.q, params.n, params.p, params.s) {
                (Some(q), Some(n), Some(p), Some(s)) => q == 5 * n && q <= p.saturating_sub(s),
                _ => false,
            };
            fin(eps * eps / bq, ok)
        }
        BoundId::EmpiricalUbWi1Lp => Err(Error::MissingParam {
            bound: id.as_str(),
            param: "correlation order (use empirical_ub_wI1_lp)",
        }),
    }
}

/// Off-support columns sorted by `B_i^T (-eps) = |A_i^T eps|`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationOrder {
    /// Column indices into the full design (all `>= s`).
    pub indices: Vec<usize>,
    /// `B_(i)^T (-eps)`, non-increasing and non-negative.
    pub inner_products: Vec<f64>,
    /// `+1` when `B_(i) = A_(i)`, `-1` when it is the flipped column.
    pub signs: Vec<f64>,
    pub q: usize,
}

pub fn sorted_noise_correlations(ts: &TrainingSet, q: usize) -> Result<CorrelationOrder> {
    let available = ts.p - ts.s.min(ts.p);
    if q == 0 || q > available {
        return Err(Error::BadQ { q, available });
    }
    let eps = &ts.noise.values;
    let neg: Vec<f64> = eps.iter().map(|v| -v).collect();
    let raw: Vec<f64> = (ts.s..ts.p).map(|j| crate::linalg::dot(col(ts.x(), j), &neg)).collect();
    let mut order: Vec<usize> = (0..available).collect();
    let cmp = |a: &usize, b: &usize| raw[*b].abs().total_cmp(&raw[*a].abs()).then(a.cmp(b));
    if q < available {
        order.select_nth_unstable_by(q - 1, cmp);
        order.truncate(q);
    }
    order.sort_unstable_by(cmp);
    Ok(CorrelationOrder {
        indices: order.iter().map(|&i| i + ts.s).collect(),
        inner_products: order.iter().map(|&i| raw[i].abs()).collect(),
        signs: order.iter().map(|&i| if raw[i] >= 0.0 { 1.0 } else { -1.0 }).collect(),
        q,
    })
}

/// `max lambda^T (-eps) s.t. lambda^T B_(i) <= 1` for the first `order.q`
/// sorted columns.
///
/// Solved through its dual `min 1^T mu s.t. sum_i mu_i B_(i) = -eps,
/// mu >= 0`; an infeasible dual means the relaxation is unbounded.
#[allow(non_snake_case)]
pub fn empirical_ub_wI1_lp(ts: &TrainingSet, order: &CorrelationOrder) -> Result<BoundValue> {
    if order.q == 0 || order.indices.len() < order.q {
        return Err(Error::BadQ {
            q: order.q,
            available: order.indices.len(),
        });
    }
    let n = ts.n;
    let mut b = DMatrix::zeros(n, order.q);
    for (c, (&j, &sg)) in order.indices.iter().zip(&order.signs).take(order.q).enumerate() {
        for (dst, src) in b.column_mut(c).iter_mut().zip(col(ts.x(), j)) {
            *dst = sg * src;
        }
    }
    let rhs: Vec<f64> = ts.noise.values.iter().map(|v| -v).collect();
    let lp = LinearProgram::nonnegative(vec![1.0; order.q], ConstraintMatrix::Dense(b), rhs, Sense::Minimize);
    let res = lp::lp_solve(&lp)?;
    match res.status {
        Status::Optimal => Ok(BoundValue::Finite(res.objective_value)),
        Status::Infeasible => Ok(BoundValue::Unbounded),
        Status::Unbounded => Err(Error::NumericalBreakdown("relaxed dual reported unbounded".into())),
    }
}

/// Exact quantities a ledger can be built against.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ExactValues {
    pub wi_l1: Option<f64>,
    pub wbp_l1: Option<f64>,
    pub wbp_l2: Option<f64>,
    pub m: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LedgerSlot {
    Evaluated(LedgerEntry),
    NotEvaluable(String),
}

impl LedgerSlot {
    pub fn value(&self) -> Option<f64> {
        match self {
            LedgerSlot::Evaluated(e) => e.value.finite(),
            LedgerSlot::NotEvaluable(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundLedger {
    pub entries: BTreeMap<BoundId, LedgerSlot>,
    pub exact: ExactValues,
    pub params: BoundParams,
}

impl BoundLedger {
    pub fn get(&self, id: BoundId) -> Option<f64> {
        self.entries.get(&id).and_then(LedgerSlot::value)
    }
}

/// Evaluates every bound for one instance. `q` defaults to `min(5n, p - s)`.
pub fn bound_ledger(ts: &TrainingSet, exact: &ExactValues, q: Option<usize>) -> BoundLedger {
    bound_ledger_with(ts, exact, q, &BoundId::ALL)
}

/// [`bound_ledger`] restricted to `ids`.
pub fn bound_ledger_with(ts: &TrainingSet, exact: &ExactValues, q: Option<usize>, ids: &[BoundId]) -> BoundLedger {
    let eps_norm = norm2(&ts.noise.values);
    let noisy = eps_norm > 0.0;
    let q = q.unwrap_or((5 * ts.n).min(ts.p - ts.s.min(ts.p)));
    let order = if noisy && ids.iter().any(|b| b.source() != Source::ClosedForm) {
        sorted_noise_correlations(ts, q)
    } else {
        Err(Error::BadQ { q: 0, available: 0 })
    };
    let mut params = BoundParams {
        n: Some(ts.n),
        p: Some(ts.p),
        s: Some(ts.s),
        eps_norm: noisy.then_some(eps_norm),
        m: exact.m,
        wi_l1: exact.wi_l1,
        wbp_l1: exact.wbp_l1,
        q: Some(q),
        beta_norm: Some(ts.truth.beta_norm),
        sigma: Some(ts.noise.level),
        ..Default::default()
    };
    if let Ok(o) = &order {
        params.b_first = o.inner_products.first().copied();
        params.b_q = o.inner_products.last().copied();
    }
    let mut entries = BTreeMap::new();
    for &id in ids {
        let slot = if id == BoundId::EmpiricalUbWi1Lp {
            match &order {
                Ok(o) => match empirical_ub_wI1_lp(ts, o) {
                    Ok(v) => LedgerSlot::Evaluated(LedgerEntry::new(id, v, true)),
                    Err(e) => LedgerSlot::NotEvaluable(e.to_string()),
                },
                Err(_) if !noisy => LedgerSlot::NotEvaluable("noiseless instance".into()),
                Err(e) => LedgerSlot::NotEvaluable(e.to_string()),
            }
        } else {
            match eval_bound(id, &params) {
                Ok(e) => LedgerSlot::Evaluated(e),
                Err(e) => LedgerSlot::NotEvaluable(e.to_string()),
            }
        };
        entries.insert(id, slot);
    }
    BoundLedger {
        entries,
        exact: *exact,
        params,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InstanceSpec, NoiseMode};
    use crate::solvers::noise_interpolator;

    fn val(id: BoundId, p: &BoundParams) -> f64 {
        eval_bound(id, p).unwrap().value.finite().unwrap()
    }

    #[test]
    fn identifiers_round_trip() {
        for id in BoundId::ALL {
            assert_eq!(BoundId::parse(id.as_str()), Some(id));
        }
        assert_eq!(BoundId::parse("nope"), None);
    }

    #[test]
    fn c_constant() {
        assert!((constant_c() - 0.0628).abs() < 5e-4);
    }

    #[test]
    fn main_bound_unit_ratio() {
        // 7n / ln p = 1 with n = 1, p = e^7.
        let p = BoundParams {
            n: Some(1),
            p: Some(7f64.exp().round() as usize),
            s: Some(1),
            eps_norm: Some(1.0),
            ..Default::default()
        };
        let v = val(BoundId::MainUbWbp2, &p);
        let exact = 2.0 + 8.0 * (7.0 / (1097.0f64).ln()).powf(0.25);
        assert!((v - exact).abs() < 1e-12);
        assert!((v - 10.0).abs() < 1e-3);
    }

    #[test]
    fn floor_bound_arithmetic() {
        let p = BoundParams {
            n: Some(100),
            s: Some(1),
            eps_norm: Some(1.0),
            ..Default::default()
        };
        let v = val(BoundId::FloorUbWbp2, &p);
        assert!((v - (2.0 + 32.0 * 14f64.sqrt())).abs() < 1e-12);
        assert!((v - 121.73).abs() < 0.01);
    }

    #[test]
    fn l2_half_projection() {
        let p = BoundParams {
            n: Some(100),
            p: Some(200),
            beta_norm: Some(1.0),
            sigma: Some(0.0),
            ..Default::default()
        };
        assert!((val(BoundId::L2ExpectedSqError, &p) - 0.5).abs() < 1e-15);
        let close = BoundParams { p: Some(101), ..p };
        assert!(matches!(
            eval_bound(BoundId::L2ExpectedSqError, &close),
            Err(Error::DomainError { .. })
        ));
    }

    #[test]
    fn k_dependent_bounds_need_positive_k() {
        let p = BoundParams {
            s: Some(2),
            m: Some(0.5),
            wi_l1: Some(1.0),
            eps_norm: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(
            eval_bound(BoundId::Prop1UbWbp1, &p),
            Err(Error::DomainError { .. })
        ));
        assert!(matches!(
            eval_bound(BoundId::Cor3UbWbp2, &p),
            Err(Error::DomainError { .. })
        ));
        let ok = BoundParams {
            s: Some(1),
            m: Some(0.2),
            ..p
        };
        // K = 2
        let want = (1.0 + 4.0 + 2.0 / 2f64.sqrt()) + 2.0 / (0.4f64).sqrt();
        assert!((val(BoundId::Prop1UbWbp1, &ok) - want).abs() < 1e-12);
    }

    #[test]
    fn missing_and_domain_errors() {
        let p = BoundParams {
            n: Some(20),
            ..Default::default()
        };
        assert!(matches!(
            eval_bound(BoundId::Prop5UbM, &p),
            Err(Error::MissingParam { param: "p", .. })
        ));
        let p1 = BoundParams {
            n: Some(20),
            p: Some(1),
            ..Default::default()
        };
        assert!(matches!(
            eval_bound(BoundId::Prop5UbM, &p1),
            Err(Error::DomainError { .. })
        ));
        let small = BoundParams {
            n: Some(20),
            p: Some(100),
            s: Some(1),
            eps_norm: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(
            eval_bound(BoundId::Prop4dUbWi1, &small),
            Err(Error::DomainError { .. })
        ));
    }

    #[test]
    fn regime_flags() {
        let base = BoundParams {
            n: Some(100),
            p: Some(1000),
            s: Some(1),
            eps_norm: Some(1.0),
            ..Default::default()
        };
        assert!(!eval_bound(BoundId::MainUbWbp2, &base).unwrap().regime_ok);
        assert!(!eval_bound(BoundId::Prop4UbWi1, &base).unwrap().regime_ok);
        // e^{100/36} ~ 16
        assert!(!eval_bound(BoundId::Prop5UbM, &base).unwrap().regime_ok);
        let wide = BoundParams {
            n: Some(2000),
            p: Some(1000),
            ..base
        };
        assert!(eval_bound(BoundId::Prop5UbM, &wide).unwrap().regime_ok);
        assert!(eval_bound(BoundId::LbWi1, &wide).unwrap().regime_ok);
    }

    fn instance(n: usize, p: usize, seed: u64) -> TrainingSet {
        InstanceSpec {
            n,
            p,
            s: 1,
            beta_norm: 1.0,
            noise_mode: NoiseMode::ExactNorm,
            noise_level: 0.01,
        }
        .generate(seed)
        .unwrap()
    }

    #[test]
    fn correlations_match_full_sort() {
        let ts = instance(5, 20, 3);
        let full = sorted_noise_correlations(&ts, 19).unwrap();
        let mut reference: Vec<(f64, usize)> = (1..20)
            .map(|j| (crate::linalg::dot(col(ts.x(), j), &ts.noise.values).abs(), j))
            .collect();
        reference.sort_by(|a, b| b.0.total_cmp(&a.0));
        for (i, (v, j)) in reference.iter().enumerate() {
            assert_eq!(full.indices[i], *j);
            assert!((full.inner_products[i] - v).abs() < 1e-15);
        }
        let top = sorted_noise_correlations(&ts, 4).unwrap();
        assert_eq!(top.indices, full.indices[..4]);
        assert!(matches!(sorted_noise_correlations(&ts, 20), Err(Error::BadQ { .. })));
    }

    #[test]
    fn aligned_noise_hits_its_column() {
        let mut ts = instance(4, 10, 5);
        let j = 6;
        ts.noise.values = col(ts.x(), j).iter().map(|v| -0.3 * v).collect();
        let o = sorted_noise_correlations(&ts, 3).unwrap();
        assert_eq!(o.indices[0], j);
        assert!((o.inner_products[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn single_constraint_relaxation() {
        // n = 1: the only direction is along -eps.
        let ts = instance(1, 4, 2);
        let o = sorted_noise_correlations(&ts, 1).unwrap();
        let v = empirical_ub_wI1_lp(&ts, &o).unwrap().finite().unwrap();
        let e = ts.noise.norm();
        assert!((v - e * e / o.inner_products[0]).abs() < 1e-12);
        // n >= 2 with a generic eps: lambda can move orthogonally to B_(1).
        let ts = instance(3, 8, 2);
        let o = sorted_noise_correlations(&ts, 1).unwrap();
        assert_eq!(empirical_ub_wI1_lp(&ts, &o).unwrap(), BoundValue::Unbounded);
    }

    #[test]
    fn hemisphere_is_unbounded() {
        // Both off-support columns lie in x > 0, so their cone misses -eps = (0, 1).
        let mut ts = instance(2, 3, 1);
        let a = 1.0 / (1.01f64).sqrt();
        ts.design.columns = DMatrix::from_vec(2, 3, vec![0.0, 1.0, a, 0.1 * a, 1.0, 0.0]);
        ts.noise.values = vec![0.0, -1.0];
        let o = sorted_noise_correlations(&ts, 2).unwrap();
        assert_eq!(o.indices, vec![1, 2]);
        assert_eq!(empirical_ub_wI1_lp(&ts, &o).unwrap(), BoundValue::Unbounded);
    }

    #[test]
    fn ledger_chain_on_small_instance() {
        let ts = instance(20, 400, 9);
        let wi = noise_interpolator(&ts).unwrap().model_error_l1;
        let ledger = bound_ledger(
            &ts,
            &ExactValues {
                wi_l1: Some(wi),
                ..Default::default()
            },
            None,
        );
        let eps = ts.noise.norm();
        let lb = ledger.get(BoundId::EmpLbWi1B1).unwrap();
        assert!(eps <= lb + 1e-15 && lb <= wi + 1e-12);
        if let Some(ub) = ledger.get(BoundId::EmpiricalUbWi1Lp) {
            assert!(wi <= ub * (1.0 + 1e-9));
        }
        assert!(matches!(
            ledger.entries[&BoundId::Prop1UbWbp1],
            LedgerSlot::NotEvaluable(_)
        ));
    }

    #[test]
    fn noiseless_ledger_skips_noise_terms() {
        let ts = InstanceSpec {
            n: 5,
            p: 30,
            s: 1,
            beta_norm: 1.0,
            noise_mode: NoiseMode::ExactNorm,
            noise_level: 0.0,
        }
        .generate(1)
        .unwrap();
        let ledger = bound_ledger(&ts, &ExactValues::default(), None);
        for id in [
            BoundId::EmpLbWi1B1,
            BoundId::EmpiricalUbWi1Lp,
            BoundId::Prop4UbWi1,
            BoundId::MainUbWbp2,
        ] {
            assert!(matches!(ledger.entries[&id], LedgerSlot::NotEvaluable(_)), "{id}");
        }
        assert!(ledger.get(BoundId::Prop5UbM).is_some());
    }
}
