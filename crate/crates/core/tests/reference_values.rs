//! Frozen values: hand-derived oracles and preset settings.

use approx::assert_relative_eq;
use bpdd::bounds::{constant_c, descent_floor_p, eval_bound, BoundId, BoundParams};
use bpdd::experiments::figure_preset;
use bpdd::incoherence::k_factor;
use bpdd::model::{make_noise, InstanceSpec, NoiseMode};
use bpdd::solvers::{basis_pursuit, brute_force_l1};

#[test]
fn k_is_at_least_four_below_one_over_eight_s() {
    for s in 1..=50 {
        let k = k_factor(1.0 / (8.0 * s as f64), s).unwrap();
        assert_relative_eq!(k, 4.0 + 1.0 / s as f64, max_relative = 1e-12);
        assert!(k >= 4.0);
    }
}

#[test]
fn gaussian_noise_norm_concentrates_near_sigma() {
    let inside = (0..200)
        .map(|seed| make_noise(10_000, NoiseMode::GaussianSigma, 1.0, seed).unwrap().norm())
        .filter(|v| (0.5f64.sqrt()..=2f64.sqrt()).contains(v))
        .count();
    assert_eq!(inside, 200);
}

#[test]
fn constant_c_value() {
    let c = 0.2 * (1.0 - (-0.5f64).exp()) * (2.0 / std::f64::consts::PI).sqrt();
    assert_relative_eq!(constant_c(), c, max_relative = 1e-15);
    assert!((constant_c() - 0.0628).abs() < 5e-5);
}

#[test]
fn min_l2_expected_error_closed_form() {
    // 1 * (1 - 500/600) + 0.01^2 * 500 / 99
    let params = BoundParams {
        n: Some(500),
        p: Some(600),
        beta_norm: Some(1.0),
        sigma: Some(0.01),
        ..Default::default()
    };
    let v = eval_bound(BoundId::L2ExpectedSqError, &params)
        .unwrap()
        .value
        .finite()
        .unwrap();
    assert_relative_eq!(v, 1.0 / 6.0 + 5e-2 / 99.0, max_relative = 1e-14);
    assert!(eval_bound(BoundId::L2ExpectedSqError, &BoundParams { p: Some(501), ..params }).is_err());
}

#[test]
fn lower_bounds_hand_computed() {
    let params = BoundParams {
        n: Some(100),
        p: Some(1000),
        s: Some(1),
        eps_norm: Some(2.0),
        ..Default::default()
    };
    let ln_p = 1000f64.ln();
    let l2 = eval_bound(BoundId::LbWbp2, &params).unwrap().value.finite().unwrap();
    assert_relative_eq!(l2, 2.0 / (3.0 * 2f64.sqrt() * ln_p.sqrt()), max_relative = 1e-14);
    let l1 = eval_bound(BoundId::LbWbp1, &params).unwrap().value.finite().unwrap();
    assert_relative_eq!(l1, 2.0 * (100.0 / ln_p).sqrt() / 3.0, max_relative = 1e-14);
    let wi = eval_bound(BoundId::LbWi1, &params).unwrap().value.finite().unwrap();
    assert_relative_eq!(wi, 2.0 * (1.0 + 100.0 / (9.0 * ln_p)).sqrt(), max_relative = 1e-14);
}

#[test]
fn descent_floor_grows_exponentially_in_n() {
    assert_eq!(descent_floor_p(1792, 1), 2.0);
    assert_eq!(descent_floor_p(3584 * 4, 2), 7.0);
    assert!(descent_floor_p(100_000, 1) > 1e24);
}

#[test]
fn preset_settings() {
    assert_eq!(figure_preset("fig_M").unwrap().n_values, vec![300, 1200]);
    let noise: Vec<f64> = figure_preset("fig_change_noise")
        .unwrap()
        .settings
        .iter()
        .map(|s| s.noise_level)
        .collect();
    assert_eq!(noise, vec![0.01, 0.04, 0.16]);
    let v = figure_preset("fig_validate_n").unwrap();
    let pairs: Vec<(usize, f64)> = v.settings.iter().map(|s| (s.s, s.noise_level)).collect();
    assert_eq!(pairs, vec![(1, 0.15), (20, 0.15), (20, 0.6)]);
    assert_eq!(v.p_values, vec![5000]);
    let c = figure_preset("fig_compare").unwrap();
    let sb: Vec<(usize, f64)> = c.settings.iter().map(|s| (s.s, s.beta_norm)).collect();
    assert_eq!(sb, vec![(1, 1.0), (100, 1.0), (100, 0.1)]);
    assert!(c.settings.iter().all(|s| s.noise_level == 0.01));
}

#[test]
fn pinned_bp_instance_matches_enumeration() {
    let ts = InstanceSpec {
        n: 2,
        p: 4,
        s: 1,
        beta_norm: 1.0,
        noise_mode: NoiseMode::ExactNorm,
        noise_level: 0.3,
    }
    .generate(11)
    .unwrap();
    let lp: f64 = basis_pursuit(&ts).unwrap().estimate.iter().map(|v| v.abs()).sum();
    let oracle = brute_force_l1(ts.x(), &ts.observations, 0).unwrap();
    assert_relative_eq!(lp, oracle, max_relative = 1e-9);
}
