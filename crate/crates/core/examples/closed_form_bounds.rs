//! Closed-form bounds as functions of n and p, including where the
//! main upper bound's regime would start.
//!
//! cargo run --example closed_form_bounds

use bpdd::bounds::{descent_floor_p, eval_bound, BoundId, BoundParams};

fn main() -> bpdd::Result<()> {
    let n = 1000;
    for p in [1e4, 1e6, 1e9, 1e12, 1e15] {
        let params = BoundParams {
            n: Some(n),
            p: Some(p as usize),
            s: Some(1),
            eps_norm: Some(1.0),
            ..Default::default()
        };
        let ub = eval_bound(BoundId::MainUbWbp2, &params)?;
        let lb = eval_bound(BoundId::LbWbp2, &params)?;
        println!(
            "p={p:.0e}: {:.4} <= ||w_BP||_2/||eps|| <= {:.4}  (upper regime {}, lower regime {})",
            lb.value.finite().unwrap(),
            ub.value.finite().unwrap(),
            ub.regime_ok,
            lb.regime_ok
        );
    }
    for n in [100_000, 200_000, 400_000] {
        let params = BoundParams {
            n: Some(n),
            s: Some(1),
            eps_norm: Some(1.0),
            ..Default::default()
        };
        let floor = eval_bound(BoundId::FloorUbWbp2, &params)?;
        println!(
            "n={n}: floor {:.2} (regime {}), reached near p = {:.3e}, regime starts at p = {:.3e}",
            floor.value.finite().unwrap(),
            floor.regime_ok,
            descent_floor_p(n, 1),
            (16.0 * n as f64).powi(4)
        );
    }
    Ok(())
}
