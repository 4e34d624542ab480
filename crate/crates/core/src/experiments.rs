//! Monte-Carlo sweeps over `(n, p)` grids and the figure presets.
//!
//! A sweep is a pure function of its [`SweepSpec`]. Trial seeds come from
//! `mix_seed(base_seed, [figure tag, n index, p index, trial])`; every
//! setting (curve) of a spec reuses the same seeds, so curves that differ
//! only in `s`, `||beta||` or the noise level see the same designs and noise
//! directions. With `nested_p` the p index is dropped: one design of the
//! widest `p` is drawn per trial and narrower cells use its prefixes.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bounds::{bound_ledger_with, BoundId, ExactValues, Kind, Target};
use crate::error::{Error, Result};
use crate::incoherence::{incoherence, incoherence_profile, k_factor};
use crate::model::{InstanceSpec, NoiseMode, TrainingSet};
use crate::output::{PlotSpec, XAxis};
use crate::rng::{label_tag, mix_seed};
use crate::solvers::{self, InterpolatorOutput};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Estimator {
    Bp,
    MinL2,
    MinMse,
    Wi,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [Estimator::Bp, Estimator::MinL2, Estimator::MinMse, Estimator::Wi];

    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Bp => "bp",
            Estimator::MinL2 => "min_l2",
            Estimator::MinMse => "min_mse",
            Estimator::Wi => "wI",
        }
    }

    pub fn parse(name: &str) -> Option<Estimator> {
        Estimator::ALL.into_iter().find(|e| e.as_str() == name)
    }
}

/// One curve: the parameters that stay fixed while `n` and `p` vary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Setting {
    pub s: usize,
    pub beta_norm: f64,
    pub noise_mode: NoiseMode,
    pub noise_level: f64,
}

impl Setting {
    pub fn label(&self) -> String {
        let mode = match self.noise_mode {
            NoiseMode::ExactNorm => "e",
            NoiseMode::GaussianSigma => "sigma",
        };
        format!("s{}_b{}_{}{}", self.s, self.beta_norm, mode, self.noise_level)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Preset name, or a free label for inline sweeps. Part of the seed.
    pub name: String,
    pub n_values: Vec<usize>,
    pub p_values: Vec<usize>,
    pub settings: Vec<Setting>,
    pub trials: usize,
    pub base_seed: u64,
    pub estimators: Vec<Estimator>,
    pub bounds: Vec<BoundId>,
    /// Also compute `M` and `K`.
    pub incoherence: bool,
    pub nested_p: bool,
    /// Sorted-correlation count for the empirical bounds (default `min(5n, p - s)`).
    pub q: Option<usize>,
    pub figure_preset: Option<String>,
    /// Desk-scale reductions, echoed into the CSV metadata.
    pub notes: Vec<String>,
    pub plots: Vec<PlotSpec>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.n_values.is_empty() || self.p_values.is_empty() || self.settings.is_empty() {
            return bad("n, p and settings must be non-empty".into());
        }
        if self.p_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("p values must be strictly ascending: {:?}", self.p_values));
        }
        if self.n_values.contains(&0) || self.p_values[0] == 0 {
            return bad("n and p must be positive".into());
        }
        for st in &self.settings {
            if st.s > self.p_values[0] {
                return bad(format!("s={} exceeds the smallest p={}", st.s, self.p_values[0]));
            }
            if !(st.noise_level >= 0.0 && st.beta_norm >= 0.0) {
                return bad("noise level and beta norm must be non-negative".into());
            }
        }
        Ok(())
    }

    fn wants(&self, e: Estimator) -> bool {
        self.estimators.contains(&e)
    }

    fn needs_m(&self) -> bool {
        self.incoherence
            || self
                .bounds
                .iter()
                .any(|b| matches!(b, BoundId::Prop1UbWbp1 | BoundId::Prop2UbWbp2 | BoundId::Cor3UbWbp2))
    }

    /// Column names of the per-trial quantities, in output order.
    pub fn quantities(&self) -> Vec<String> {
        let mut q: Vec<&str> = Vec::new();
        if self.wants(Estimator::Bp) {
            q.extend(["wBP_l2", "wBP_l1", "wBP_l2_unscaled", "wBP_nnz"]);
        }
        if self.wants(Estimator::MinL2) {
            q.extend(["wL2_l2", "wL2_l2_unscaled", "wL2_l2sq_unscaled"]);
        }
        if self.wants(Estimator::MinMse) {
            q.extend(["wMSE_l2", "wMSE_l2_unscaled"]);
        }
        if self.wants(Estimator::Wi) {
            q.push("wI_l1");
        }
        if self.needs_m() {
            q.extend(["M", "K"]);
        }
        let mut out: Vec<String> = q.into_iter().map(String::from).collect();
        out.extend(self.bounds.iter().map(|b| b.as_str().to_string()));
        out
    }

    fn seed(&self, n_idx: usize, p_idx: Option<usize>, trial: usize) -> u64 {
        let p = p_idx.map_or(u64::MAX, |v| v as u64);
        mix_seed(self.base_seed, &[label_tag(&self.name), n_idx as u64, p, trial as u64])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantityStats {
    pub median: f64,
    pub mean: f64,
    pub q10: f64,
    pub q90: f64,
    /// Trials contributing a value.
    pub count: usize,
}

impl QuantityStats {
    /// Linear-interpolation quantiles of the sorted sample; `None` when empty.
    pub fn from_samples(mut v: Vec<f64>) -> Option<QuantityStats> {
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let q = |t: f64| {
            let pos = t * (v.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(QuantityStats {
            median: q(0.5),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            q10: q(0.1),
            q90: q(0.9),
            count: v.len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellStats {
    pub setting: usize,
    pub curve: String,
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub beta_norm: f64,
    pub noise_level: f64,
    pub trials: usize,
    /// Trials in which at least one estimator failed.
    pub failures: usize,
    /// `p < n`: BP and min-l2 columns hold the min-MSE fit instead.
    pub fallback_min_mse: bool,
    pub stats: Vec<(String, Option<QuantityStats>)>,
    pub violations: Vec<(BoundId, usize)>,
}

impl CellStats {
    pub fn get(&self, quantity: &str) -> Option<&QuantityStats> {
        self.stats
            .iter()
            .find(|(k, _)| k == quantity)
            .and_then(|(_, v)| v.as_ref())
    }

    pub fn violations_of(&self, id: BoundId) -> Option<usize> {
        self.violations.iter().find(|(b, _)| *b == id).map(|(_, v)| *v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub cells: Vec<CellStats>,
}

/// Per-trial values aligned with [`SweepSpec::quantities`].
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub values: Vec<Option<f64>>,
    pub violated: Vec<bool>,
    pub failed: bool,
}

fn put(map: &mut BTreeMap<&'static str, f64>, key: &'static str, v: f64) {
    map.insert(key, v);
}

/// Runs the requested estimators and bounds on one instance.
pub fn run_trial(spec: &SweepSpec, ts: &TrainingSet, m: Option<f64>) -> TrialRecord {
    let mut vals: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut failed = false;
    let fallback = ts.p < ts.n;
    let mut ok = |r: Result<InterpolatorOutput>| match r {
        Ok(o) => Some(o),
        Err(_) => {
            failed = true;
            None
        }
    };
    let mse =
        if fallback && (spec.wants(Estimator::Bp) || spec.wants(Estimator::MinL2) || spec.wants(Estimator::MinMse)) {
            ok(solvers::min_mse(ts))
        } else {
            None
        };
    let bp = if spec.wants(Estimator::Bp) {
        if fallback {
            mse.clone()
        } else {
            ok(solvers::basis_pursuit(ts))
        }
    } else {
        None
    };
    if let Some(o) = &bp {
        put(&mut vals, "wBP_l2", o.model_error_l2);
        put(&mut vals, "wBP_l1", o.model_error_l1);
        put(&mut vals, "wBP_l2_unscaled", o.model_error_l2_unscaled);
        put(&mut vals, "wBP_nnz", o.nonzero_count as f64);
    }
    if spec.wants(Estimator::MinL2) {
        let o = if fallback {
            mse.clone()
        } else {
            ok(solvers::min_l2_overfit(ts))
        };
        if let Some(o) = o {
            put(&mut vals, "wL2_l2", o.model_error_l2);
            put(&mut vals, "wL2_l2_unscaled", o.model_error_l2_unscaled);
            put(&mut vals, "wL2_l2sq_unscaled", o.model_error_l2_unscaled.powi(2));
        }
    }
    if spec.wants(Estimator::MinMse) {
        if let Some(o) = &mse {
            put(&mut vals, "wMSE_l2", o.model_error_l2);
            put(&mut vals, "wMSE_l2_unscaled", o.model_error_l2_unscaled);
        }
    }
    let mut wi = None;
    if spec.wants(Estimator::Wi) && ts.noise.norm() > 0.0 && ts.p - ts.s >= ts.n {
        if let Some(o) = ok(solvers::noise_interpolator(ts)) {
            put(&mut vals, "wI_l1", o.model_error_l1);
            wi = Some(o.model_error_l1);
        }
    }
    if let Some(m) = m {
        put(&mut vals, "M", m);
        if let Ok(k) = k_factor(m, ts.s) {
            put(&mut vals, "K", k);
        }
    }
    let exact = ExactValues {
        wi_l1: wi,
        wbp_l1: bp.as_ref().filter(|_| !fallback).map(|o| o.model_error_l1),
        wbp_l2: bp.as_ref().filter(|_| !fallback).map(|o| o.model_error_l2),
        m,
    };
    let ledger = bound_ledger_with(ts, &exact, spec.q, &spec.bounds);
    let mut violated = Vec::with_capacity(spec.bounds.len());
    for &id in &spec.bounds {
        let v = ledger.get(id);
        if let Some(v) = v {
            vals.insert(id.as_str(), v);
        }
        let truth = match id.target() {
            Target::WiL1 => exact.wi_l1,
            Target::WbpL1 => exact.wbp_l1,
            Target::WbpL2 => exact.wbp_l2,
            Target::M => exact.m,
            Target::Wl2SqError => None,
        };
        violated.push(match (v, truth, id.kind()) {
            (Some(b), Some(t), Kind::Upper) => t > b + 1e-9 * b.abs().max(1e-3),
            (Some(b), Some(t), Kind::Lower) => t < b - 1e-9 * b.abs().max(1e-3),
            _ => false,
        });
    }
    let values = spec
        .quantities()
        .iter()
        .map(|q| vals.get(q.as_str()).copied())
        .collect();
    TrialRecord {
        values,
        violated,
        failed,
    }
}

fn instance(spec: &SweepSpec, setting: &Setting, n: usize, p: usize, seed: u64) -> Result<TrainingSet> {
    InstanceSpec {
        n,
        p,
        s: setting.s,
        beta_norm: setting.beta_norm,
        noise_mode: setting.noise_mode,
        noise_level: setting.noise_level,
    }
    .generate(seed)
    .map_err(|e| Error::InvalidParameter(format!("{}: {e}", spec.name)))
}

/// All trials of one `(setting, n, trial)` row of a nested sweep, or of
/// one cell when `p_idx` is given.
fn run_unit(spec: &SweepSpec, si: usize, ni: usize, p_idx: Option<usize>, trial: usize) -> Vec<(usize, TrialRecord)> {
    let setting = &spec.settings[si];
    let n = spec.n_values[ni];
    let fail = |k: usize| (k, failed_record(spec));
    if spec.nested_p {
        let widest = *spec.p_values.last().unwrap();
        let wide = match instance(spec, setting, n, widest, spec.seed(ni, None, trial)) {
            Ok(ts) => ts,
            Err(_) => return indices(spec, p_idx).map(fail).collect(),
        };
        let profile = if spec.needs_m() {
            incoherence_profile(&wide.design, &spec.p_values).ok()
        } else {
            None
        };
        indices(spec, p_idx)
            .map(|k| match wide.prefix(spec.p_values[k]) {
                Ok(ts) => (k, run_trial(spec, &ts, profile.as_ref().map(|v| v[k]))),
                Err(_) => fail(k),
            })
            .collect()
    } else {
        indices(spec, p_idx)
            .map(
                |k| match instance(spec, setting, n, spec.p_values[k], spec.seed(ni, Some(k), trial)) {
                    Ok(ts) => {
                        let m = (spec.needs_m() && ts.p >= 2).then(|| incoherence(&ts.design));
                        (k, run_trial(spec, &ts, m))
                    }
                    Err(_) => fail(k),
                },
            )
            .collect()
    }
}

fn indices(spec: &SweepSpec, p_idx: Option<usize>) -> Box<dyn Iterator<Item = usize>> {
    match p_idx {
        Some(k) => Box::new(std::iter::once(k)),
        None => Box::new(0..spec.p_values.len()),
    }
}

fn failed_record(spec: &SweepSpec) -> TrialRecord {
    TrialRecord {
        values: vec![None; spec.quantities().len()],
        violated: vec![false; spec.bounds.len()],
        failed: true,
    }
}

fn aggregate(spec: &SweepSpec, si: usize, ni: usize, k: usize, records: &[TrialRecord]) -> CellStats {
    let st = &spec.settings[si];
    let names = spec.quantities();
    let stats = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let v: Vec<f64> = records.iter().filter_map(|r| r.values[i]).collect();
            (name.clone(), QuantityStats::from_samples(v))
        })
        .collect();
    let violations = spec
        .bounds
        .iter()
        .enumerate()
        .map(|(i, &b)| (b, records.iter().filter(|r| r.violated[i]).count()))
        .collect();
    let (n, p) = (spec.n_values[ni], spec.p_values[k]);
    CellStats {
        setting: si,
        curve: st.label(),
        n,
        p,
        s: st.s,
        beta_norm: st.beta_norm,
        noise_level: st.noise_level,
        trials: records.len(),
        failures: records.iter().filter(|r| r.failed).count(),
        fallback_min_mse: p < n
            && spec
                .estimators
                .iter()
                .any(|e| matches!(e, Estimator::Bp | Estimator::MinL2)),
        stats,
        violations,
    }
}

/// Statistics of one cell, identical to the matching row of [`sweep`].
pub fn run_cell(spec: &SweepSpec, setting: usize, n_idx: usize, p_idx: usize) -> Result<CellStats> {
    spec.validate()?;
    if setting >= spec.settings.len() || n_idx >= spec.n_values.len() || p_idx >= spec.p_values.len() {
        return Err(Error::InvalidParameter("cell index out of range".into()));
    }
    let records: Vec<TrialRecord> = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_unit(spec, setting, n_idx, Some(p_idx), t).pop().unwrap().1)
        .collect();
    Ok(aggregate(spec, setting, n_idx, p_idx, &records))
}

/// Per-trial records of every cell, keyed by `(setting, n index, p index)`.
pub fn sweep_records(spec: &SweepSpec) -> Result<BTreeMap<(usize, usize, usize), Vec<TrialRecord>>> {
    spec.validate()?;
    let (ns, np) = (spec.n_values.len(), spec.p_values.len());
    let mut units: Vec<(usize, usize, Option<usize>, usize)> = Vec::new();
    for si in 0..spec.settings.len() {
        for ni in 0..ns {
            for t in 0..spec.trials {
                if spec.nested_p {
                    units.push((si, ni, None, t));
                } else {
                    units.extend((0..np).map(|k| (si, ni, Some(k), t)));
                }
            }
        }
    }
    let work = || -> Vec<Vec<(usize, TrialRecord)>> {
        units
            .par_iter()
            .map(|&(si, ni, pk, t)| run_unit(spec, si, ni, pk, t))
            .collect()
    };
    let results = match thread_override() {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let mut cells: BTreeMap<(usize, usize, usize), Vec<TrialRecord>> = BTreeMap::new();
    for (&(si, ni, _, _), recs) in units.iter().zip(results) {
        for (k, r) in recs {
            cells.entry((si, ni, k)).or_default().push(r);
        }
    }
    Ok(cells)
}

/// Runs every cell; rows come out ordered by setting, then `n`, then `p`.
pub fn sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let records = sweep_records(spec)?;
    let cells = records
        .iter()
        .map(|(&(si, ni, k), recs)| aggregate(spec, si, ni, k, recs))
        .collect();
    Ok(SweepTable {
        spec: spec.clone(),
        cells,
    })
}

/// Thread count from `BPDD_THREADS`, when set to a positive integer.
pub fn thread_override() -> Option<usize> {
    std::env::var("BPDD_THREADS")
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub curve: String,
    pub n: usize,
    pub p_at_min: usize,
    pub min_value: f64,
}

/// Smallest median of `quantity` along each `(curve, n)` line, skipping
/// min-MSE fallback cells. Lines with fewer than two points are dropped.
pub fn extract_minima(table: &SweepTable, quantity: &str) -> Vec<Minimum> {
    type Line = Vec<(usize, f64, String)>;
    let mut lines: BTreeMap<(usize, usize), Line> = BTreeMap::new();
    for c in &table.cells {
        if c.fallback_min_mse {
            continue;
        }
        if let Some(st) = c.get(quantity) {
            lines
                .entry((c.setting, c.n))
                .or_default()
                .push((c.p, st.median, c.curve.clone()));
        }
    }
    lines
        .into_iter()
        .filter(|(_, pts)| pts.len() >= 2)
        .map(|((_, n), pts)| {
            let best = pts
                .iter()
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                .unwrap();
            Minimum {
                curve: best.2.clone(),
                n,
                p_at_min: best.0,
                min_value: best.1,
            }
        })
        .collect()
}

/// `count` integers log-spaced over `[lo, hi]`, deduplicated.
pub fn log_grid(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if count <= 1 || lo >= hi {
        return vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut v: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    v.dedup();
    v
}

pub const PRESETS: [&str; 7] = [
    "fig_wI",
    "fig_M",
    "fig_WB",
    "fig_change_n",
    "fig_change_noise",
    "fig_compare",
    "fig_validate_n",
];

fn exact(s: usize, beta_norm: f64, level: f64) -> Setting {
    Setting {
        s,
        beta_norm,
        noise_mode: NoiseMode::ExactNorm,
        noise_level: level,
    }
}

fn plot(stem: &str, title: &str, x: XAxis, quantities: &[&str], log_y: bool) -> PlotSpec {
    PlotSpec {
        file_stem: stem.to_string(),
        title: title.to_string(),
        x,
        quantities: quantities.iter().map(|q| q.to_string()).collect(),
        log_y,
        y_n_power: 0.0,
    }
}

pub fn figure_preset(name: &str) -> Result<SweepSpec> {
    let mut spec = SweepSpec {
        name: name.to_string(),
        n_values: vec![],
        p_values: vec![],
        settings: vec![],
        trials: 20,
        base_seed: 2021,
        estimators: vec![Estimator::Bp],
        bounds: vec![],
        incoherence: false,
        nested_p: true,
        q: None,
        figure_preset: Some(name.to_string()),
        notes: vec![],
        plots: vec![],
    };
    match name {
        "fig_wI" => {
            spec.n_values = vec![20];
            spec.p_values = log_grid(101, 5001, 15);
            spec.settings = vec![exact(1, 1.0, 0.01)];
            spec.trials = 50;
            spec.estimators = vec![Estimator::Wi];
            spec.bounds = vec![
                BoundId::Prop4dUbWi1,
                BoundId::EmpUbWi1B5n,
                BoundId::EmpiricalUbWi1Lp,
                BoundId::EmpLbWi1B1,
            ];
            spec.plots = vec![plot(
                "fig_wI",
                "bounds of ||w^I||_1, n=20, ||eps||=0.01",
                XAxis::PMinusS,
                &[
                    "prop4d_ub_wI1",
                    "emp_ub_wI1_B5n",
                    "empirical_ub_wI1_lp",
                    "wI_l1",
                    "emp_lb_wI1_B1",
                ],
                true,
            )];
        }
        "fig_M" => {
            spec.n_values = vec![300, 1200];
            spec.p_values = log_grid(1000, 10000, 6);
            spec.settings = vec![exact(1, 1.0, 0.01)];
            spec.trials = 30;
            spec.estimators = vec![];
            spec.incoherence = true;
            spec.bounds = vec![BoundId::Prop5UbM, BoundId::LbM];
            spec.notes
                .push("desk scale: p grid capped at 1e4 instead of 1e5".into());
            spec.plots = vec![plot(
                "fig_M",
                "M and its upper bound",
                XAxis::P,
                &["M", "prop5_ub_M"],
                true,
            )];
        }
        "fig_WB" => {
            spec.n_values = vec![200];
            spec.p_values = log_grid(400, 20000, 10);
            spec.settings = vec![exact(1, 1.0, 0.01), exact(2, 1.0, 0.01)];
            spec.estimators = vec![Estimator::Bp, Estimator::Wi];
            spec.incoherence = true;
            spec.bounds = vec![BoundId::Cor3UbWbp2, BoundId::Prop2UbWbp2];
            spec.notes.push("desk scale: n=200 instead of 3000".into());
            spec.plots = vec![plot(
                "fig_WB",
                "||w^BP||_2 and its upper bound",
                XAxis::P,
                &["wBP_l2", "cor3_ub_wBP2"],
                true,
            )];
        }
        "fig_change_n" => {
            spec.n_values = vec![100, 250, 500];
            spec.p_values = log_grid(20, 20000, 18);
            spec.settings = vec![exact(1, 1.0, 0.01)];
            spec.notes
                .push("desk scale: n in {100, 250, 500} instead of {150, 600}; p < n cells report min-MSE".into());
            spec.plots = vec![plot(
                "fig_change_n",
                "||w^BP||_2 for several n",
                XAxis::P,
                &["wBP_l2"],
                true,
            )];
        }
        "fig_change_noise" => {
            spec.n_values = vec![100];
            spec.p_values = log_grid(150, 20000, 15);
            spec.settings = [0.01, 0.04, 0.16].into_iter().map(|e| exact(1, 1.0, e)).collect();
            spec.notes.push("p swept to 2e4".into());
            spec.plots = vec![plot(
                "fig_change_noise",
                "||w^BP||_2 for several noise levels",
                XAxis::P,
                &["wBP_l2"],
                true,
            )];
        }
        "fig_compare" => {
            spec.n_values = vec![500];
            spec.p_values = log_grid(600, 10000, 10);
            spec.settings = vec![exact(1, 1.0, 0.01), exact(100, 1.0, 0.01), exact(100, 0.1, 0.01)];
            spec.trials = 10;
            spec.estimators = vec![Estimator::Bp, Estimator::MinL2];
            spec.bounds = vec![BoundId::L2ExpectedSqError];
            spec.notes.push("p swept to 1e4".into());
            spec.plots = vec![plot(
                "fig_compare",
                "BP versus min-l2",
                XAxis::P,
                &["wBP_l2", "wL2_l2"],
                true,
            )];
        }
        "fig_validate_n" => {
            spec.n_values = vec![500, 1000, 2000];
            spec.p_values = vec![5000];
            spec.settings = vec![exact(1, 1.0, 0.15), exact(20, 1.0, 0.15), exact(20, 1.0, 0.6)];
            spec.trials = 3;
            spec.nested_p = false;
            spec.notes
                .push("desk scale: n in {500, 1000, 2000} with 3 trials, n=4000 omitted".into());
            let mut pl = plot(
                "fig_validate_n",
                "n^(-1/4) ||w^BP||_2 at p=5000",
                XAxis::N,
                &["wBP_l2"],
                false,
            );
            pl.y_n_power = -0.25;
            spec.plots = vec![pl];
        }
        _ => return Err(Error::UnknownPreset(name.to_string())),
    }
    Ok(spec)
}
