//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test --test acceptance` runs everything; trailing arguments that
//! are criterion numbers select a subset (`-- 3 5`). Set
//! `BPDD_ACCEPTANCE_FULL=1` to use the wide p grid for the incoherence
//! criterion (hours on one core).

use std::time::{Duration, Instant};

use bpdd::bounds::{bound_ledger, eval_bound, BoundId, BoundParams, BoundValue, ExactValues};
use bpdd::experiments::{extract_minima, figure_preset, log_grid, sweep, Estimator, Setting, SweepSpec};
use bpdd::incoherence::{incoherence, k_factor};
use bpdd::linalg::norm1;
use bpdd::model::{InstanceSpec, NoiseMode, TrainingSet};
use bpdd::rng::{label_tag, mix_seed};
use bpdd::solvers::{basis_pursuit, brute_force_l1, min_l2_overfit, noise_interpolator, sparsify};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn seed(name: &str, i: usize) -> u64 {
    mix_seed(0xacce_97ed, &[label_tag(name), i as u64])
}

/// Uniform draw in `[0, 1)` from a seed.
fn unit(seed: u64, k: u64) -> f64 {
    (mix_seed(seed, &[k]) >> 11) as f64 / (1u64 << 53) as f64
}

fn log_uniform(seed: u64, k: u64, lo: usize, hi: usize) -> usize {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    ((a + (b - a) * unit(seed, k)).exp().round() as usize).clamp(lo, hi)
}

fn instance(n: usize, p: usize, s: usize, beta: f64, eps: f64, seed: u64) -> TrainingSet {
    InstanceSpec {
        n,
        p,
        s,
        beta_norm: beta,
        noise_mode: NoiseMode::ExactNorm,
        noise_level: eps,
    }
    .generate(seed)
    .expect("instance generation")
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e <= limit, format!("{:.1} s of {} s", e.as_secs_f64(), limit.as_secs()))
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut bad = 0;
    for i in 0..500 {
        let sd = seed("c1", i);
        let n = 1 + (mix_seed(sd, &[0]) % 3) as usize;
        let p = 3 + (mix_seed(sd, &[1]) % 4) as usize;
        let s = 1 + (mix_seed(sd, &[2]) % 2) as usize;
        let ts = instance(n, p, s, 1.0, 0.3, sd);
        let lp = norm1(&basis_pursuit(&ts).expect("bp").estimate);
        let oracle = brute_force_l1(ts.x(), &ts.observations, 0).expect("oracle");
        let err = (lp - oracle).abs();
        worst = worst.max(err);
        if err > 1e-9 {
            bad += 1;
        }
    }
    let (fast, time) = within(t, Duration::from_secs(30));
    outcome(
        bad == 0 && fast,
        format!("{bad}/500 mismatches, max |lp - oracle| {worst:.2e}, {time}"),
    )
}

fn certificates() -> Outcome {
    let t = Instant::now();
    let (mut bad, mut worst_res, mut worst_gap) = (Vec::new(), 0.0f64, 0.0f64);
    for i in 0..200 {
        let sd = seed("c2", i);
        let n = 2 + (mix_seed(sd, &[0]) % 49) as usize;
        let s = 1 + (mix_seed(sd, &[1]) % 3) as usize;
        let p = n + s + (mix_seed(sd, &[2]) % (500 - n - s + 1) as u64) as usize;
        let ts = instance(n, p, s, 1.0, 0.1, sd);
        let bp = basis_pursuit(&ts).expect("bp");
        for (what, out) in [("bp", &bp), ("wI", &noise_interpolator(&ts).expect("wI"))] {
            let r = out.solver.as_ref().expect("solver result");
            let gap = r.duality_gap / r.objective_value.abs().max(1.0);
            worst_res = worst_res.max(r.primal_residual);
            worst_gap = worst_gap.max(gap);
            if r.primal_residual > 1e-8 || gap > 1e-7 {
                bad.push(format!("{what} #{i}"));
            }
        }
        let l1 = norm1(&bp.estimate);
        for (what, start) in [
            ("bp", bp.estimate.clone()),
            ("min_l2", min_l2_overfit(&ts).expect("min_l2").estimate),
        ] {
            let start_l1 = norm1(&start);
            let sp = sparsify(&start, &ts).expect("sparsify");
            let nnz = sp.iter().filter(|v| **v != 0.0).count();
            if nnz > n || norm1(&sp) > start_l1 + 1e-9 * start_l1.max(1.0) {
                bad.push(format!("sparsify {what} #{i}"));
            }
        }
        if bp.nonzero_count > n || l1.is_nan() {
            bad.push(format!("bp support #{i}"));
        }
    }
    let (fast, time) = within(t, Duration::from_secs(120));
    outcome(
        bad.is_empty() && fast,
        format!(
            "{} failures {:?}, max residual {worst_res:.1e}, max relative gap {worst_gap:.1e}, {time}",
            bad.len(),
            &bad[..bad.len().min(3)]
        ),
    )
}

fn bound_chain() -> Outcome {
    let (n, total) = (20, 200);
    let (mut chain_bad, mut b5n_viol, mut unbounded) = (0, 0, 0);
    for i in 0..total {
        let sd = seed("c3", i);
        let p = log_uniform(sd, 0, 100, 5000);
        let ts = instance(n, p, 1, 1.0, 0.01, sd);
        let wi = noise_interpolator(&ts).expect("wI").model_error_l1;
        let led = bound_ledger(
            &ts,
            &ExactValues {
                wi_l1: Some(wi),
                ..Default::default()
            },
            Some(5 * n),
        );
        let eps = ts.noise.norm();
        let lb = led.get(BoundId::EmpLbWi1B1).expect("lower bound");
        let up = 1.0 + 1e-9;
        let mut ok = eps <= lb * up && lb <= wi * up;
        match led.get(BoundId::EmpiricalUbWi1Lp) {
            Some(ub) => ok &= wi <= ub * up,
            None => unbounded += 1,
        }
        if !ok {
            chain_bad += 1;
        }
        if wi > led.get(BoundId::EmpUbWi1B5n).expect("B5n bound") * up {
            b5n_viol += 1;
        }
    }
    let frac = b5n_viol as f64 / total as f64;
    outcome(
        chain_bad == 0 && frac < 0.10,
        format!(
            "{chain_bad} chain violations, B5n violated in {b5n_viol}/{total}, relaxed LP unbounded in {unbounded}"
        ),
    )
}

fn dominance() -> Outcome {
    let (mut positive_k, mut bad, mut prop2_bad, mut max_k) = (0, 0, 0, f64::NEG_INFINITY);
    for i in 0..200 {
        let sd = seed("c4", i);
        let s = 1 + i % 2;
        let p = log_uniform(sd, 0, 300, 20000);
        let ts = instance(100, p, s, 1.0, 0.01, sd);
        let bp = basis_pursuit(&ts).expect("bp");
        let wi = noise_interpolator(&ts).expect("wI");
        let m = incoherence(&ts.design);
        let exact = ExactValues {
            wi_l1: Some(wi.model_error_l1),
            wbp_l1: Some(bp.model_error_l1),
            wbp_l2: Some(bp.model_error_l2),
            m: Some(m),
        };
        let led = bound_ledger(&ts, &exact, None);
        let up = 1.0 + 1e-9;
        if bp.model_error_l2 > led.get(BoundId::Prop2UbWbp2).expect("prop2") * up {
            prop2_bad += 1;
        }
        let k = k_factor(m, s).expect("K");
        max_k = max_k.max(k);
        if k > 0.0 {
            positive_k += 1;
            let p1 = led.get(BoundId::Prop1UbWbp1).expect("prop1");
            let c3 = led.get(BoundId::Cor3UbWbp2).expect("cor3");
            if bp.model_error_l1 > p1 * up || bp.model_error_l2 > c3 * up {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0 && prop2_bad == 0,
        format!(
            "K > 0 on {positive_k}/200 instances (largest K {max_k:.3}; prop1/cor3 checks vacuous when 0), {bad} prop1/cor3 violations, {prop2_bad}/200 prop2 violations"
        ),
    )
}

fn incoherence_ratio() -> Outcome {
    let t = Instant::now();
    let mut spec = figure_preset("fig_M").expect("preset");
    if std::env::var_os("BPDD_ACCEPTANCE_FULL").is_some() {
        spec.p_values = log_grid(1000, 100_000, 6);
    }
    let table = sweep(&spec).expect("sweep");
    let mean_m = |n: usize, p: usize| {
        table
            .cells
            .iter()
            .find(|c| c.n == n && c.p == p)
            .and_then(|c| c.get("M"))
            .map(|s| s.mean)
            .expect("M")
    };
    let ratios: Vec<f64> = spec
        .p_values
        .iter()
        .map(|&p| mean_m(300, p) / mean_m(1200, p))
        .collect();
    let ratio_ok = ratios.iter().all(|r| (1.6..=2.4).contains(r));
    let below = table
        .cells
        .iter()
        .filter(|c| c.get("M").unwrap().mean <= c.get("prop5_ub_M").unwrap().median)
        .count();
    let cover = below as f64 / table.cells.len() as f64;
    let (fast, time) = within(t, Duration::from_secs(300));
    let rs: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    outcome(
        ratio_ok && cover >= 0.9 && fast,
        format!(
            "p in [{}, {}], ratios [{}], M below prop5 in {below}/{} cells, {time}",
            spec.p_values[0],
            spec.p_values.last().unwrap(),
            rs.join(", "),
            table.cells.len()
        ),
    )
}

fn noise_scaling() -> Outcome {
    let t = Instant::now();
    let spec = figure_preset("fig_change_noise").expect("preset");
    let table = sweep(&spec).expect("sweep");
    let minima = extract_minima(&table, "wBP_l2");
    let v: Vec<f64> = (0..3)
        .map(|k| {
            minima
                .iter()
                .find(|m| m.curve == spec.settings[k].label())
                .expect("minimum")
                .min_value
        })
        .collect();
    let (lo, hi) = (4.0 / 1.6, 4.0 * 1.6);
    let ok =
        (0.0025..=0.010).contains(&v[0]) && (lo..=hi).contains(&(v[1] / v[0])) && (lo..=hi).contains(&(v[2] / v[1]));
    let (fast, time) = within(t, Duration::from_secs(1200));
    outcome(
        ok && fast,
        format!(
            "minima {:.5}, {:.5}, {:.5}; ratios {:.3}, {:.3}; {time}",
            v[0],
            v[1],
            v[2],
            v[1] / v[0],
            v[2] / v[1]
        ),
    )
}

fn plateau() -> Outcome {
    let spec = figure_preset("fig_validate_n").expect("preset");
    let table = sweep(&spec).expect("sweep");
    let levels: Vec<Vec<f64>> = (0..spec.settings.len())
        .map(|k| {
            spec.n_values
                .iter()
                .map(|&n| {
                    let c = table.cells.iter().find(|c| c.setting == k && c.n == n).expect("cell");
                    c.get("wBP_l2").expect("wBP_l2").median * (n as f64).powf(-0.25)
                })
                .collect()
        })
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let spreads: Vec<f64> = levels
        .iter()
        .map(|v| (v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)) / mean(v))
        .collect();
    let noise_ratio = mean(&levels[2]) / mean(&levels[1]);
    let overlap = mean(&levels[1]) / mean(&levels[0]);
    let ok = spreads.iter().all(|s| *s <= 0.25) && (3.0..=5.0).contains(&noise_ratio);
    let sp: Vec<String> = spreads.iter().map(|s| format!("{s:.3}")).collect();
    outcome(
        ok,
        format!(
            "n in {:?}, spreads [{}], 0.6/0.15 plateau ratio {noise_ratio:.3}, s=20/s=1 plateau ratio {overlap:.3}",
            spec.n_values,
            sp.join(", ")
        ),
    )
}

fn bp_versus_min_l2() -> Outcome {
    let exact = |s, b| Setting {
        s,
        beta_norm: b,
        noise_mode: NoiseMode::ExactNorm,
        noise_level: 0.01,
    };
    let spec = SweepSpec {
        name: "bp_vs_l2".into(),
        n_values: vec![250],
        p_values: log_grid(300, 5000, 8),
        settings: vec![exact(1, 1.0), exact(100, 1.0), exact(100, 0.1)],
        trials: 8,
        base_seed: 2021,
        estimators: vec![Estimator::Bp, Estimator::MinL2],
        bounds: vec![BoundId::L2ExpectedSqError],
        incoherence: false,
        nested_p: true,
        q: None,
        figure_preset: None,
        notes: vec![],
        plots: vec![],
    };
    let table = sweep(&spec).expect("sweep");
    let min_of = |q: &str, k: usize| {
        extract_minima(&table, q)
            .into_iter()
            .find(|m| m.curve == spec.settings[k].label())
            .expect("minimum")
            .min_value
    };
    let (bp1, bp100, bp100s) = (min_of("wBP_l2", 0), min_of("wBP_l2", 1), min_of("wBP_l2", 2));
    let (l2_1, l2_100, l2_100s) = (min_of("wL2_l2", 0), min_of("wL2_l2", 1), min_of("wL2_l2", 2));
    let bp_agree = bp100.max(bp100s) / bp100.min(bp100s);
    let l2_split = l2_100.max(l2_100s) / l2_100.min(l2_100s);
    let gap = l2_1 / bp1;
    let mut worst_eq9 = 0.0f64;
    for c in &table.cells {
        if let (Some(emp), Some(th)) = (c.get("wL2_l2sq_unscaled"), c.get("l2_expected_sq_error")) {
            worst_eq9 = worst_eq9.max((emp.mean - th.median).abs() / th.median);
        }
    }
    outcome(
        bp_agree <= 1.3 && l2_split >= 2.0 && gap >= 5.0 && worst_eq9 <= 0.10,
        format!(
            "n=250; BP minima s=100 ratio {bp_agree:.3}, min-l2 minima ratio {l2_split:.2}, min-l2/BP at s=1 {gap:.1}, worst E||w||^2 deviation {:.1}%",
            100.0 * worst_eq9
        ),
    )
}

fn lower_bound_frequency() -> Outcome {
    let (n, total) = (100, 200);
    let (mut l2_hits, mut l1_hits) = (0, 0);
    for i in 0..total {
        let sd = seed("c9", i);
        let p = log_uniform(sd, 0, 200, 20000);
        let ts = instance(n, p, 1, 1.0, 0.01, sd);
        let bp = basis_pursuit(&ts).expect("bp");
        let eps = ts.noise.norm();
        let ln_p = (p as f64).ln();
        if bp.model_error_l2 / eps >= 1.0 / (3.0 * 2f64.sqrt()) / ln_p.sqrt() {
            l2_hits += 1;
        }
        if bp.model_error_l1 / eps >= (n as f64 / ln_p).sqrt() / 3.0 {
            l1_hits += 1;
        }
    }
    let need = (0.95 * total as f64).ceil() as usize;
    outcome(
        l2_hits >= need && l1_hits >= need,
        format!("l2 bound held in {l2_hits}/{total}, l1 bound held in {l1_hits}/{total}"),
    )
}

fn main_regime_out_of_reach() -> Outcome {
    let at = |n: usize, p: f64, s: usize| {
        let params = BoundParams {
            n: Some(n),
            p: Some(p.min(usize::MAX as f64) as usize),
            s: Some(s),
            eps_norm: Some(1.0),
            ..Default::default()
        };
        eval_bound(BoundId::MainUbWbp2, &params).expect("main bound")
    };
    let e = at(100, 22026.0, 1);
    let value_ok = matches!(e.value, BoundValue::Finite(v) if (v - (2.0 + 8.0 * (700.0 / 22026f64.ln()).powf(0.25))).abs() < 1e-12);
    let desk_out = [(100, 20000), (500, 10000), (2000, 5000)]
        .iter()
        .all(|&(n, p)| !at(n, p as f64, 1).regime_ok);
    // Smallest n where s = 1 is admissible.
    let n_min = (1..)
        .map(|k| k * 1000)
        .find(|&n| 1.0 <= (n as f64 / (7168.0 * (16.0 * n as f64).ln())).sqrt())
        .unwrap();
    outcome(
        value_ok && desk_out,
        format!(
            "formula evaluates out of regime; regime flag false at all desk sizes; s=1 first admissible near n={n_min}, needing p >= {:.1e}",
            (16.0 * n_min as f64).powi(4)
        ),
    )
}

type Criterion = (usize, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 10] = [
    (1, "oracle equivalence", oracle_equivalence),
    (2, "certificates", certificates),
    (3, "wI bound chain", bound_chain),
    (4, "BP dominance", dominance),
    (5, "incoherence ratio", incoherence_ratio),
    (6, "noise scaling", noise_scaling),
    (7, "plateau in n", plateau),
    (8, "BP versus min-l2", bp_versus_min_l2),
    (9, "lower-bound frequency", lower_bound_frequency),
    (10, "main regime out of reach", main_regime_out_of_reach),
];

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, name, f) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&k) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {k:2} {name:26} {tag}  {} [{:.1} s]",
            o.detail,
            t.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
