//! Basis pursuit against the min-l2 interpolator over a range of p.
//!
//! cargo run --release --example compare_min_l2

use bpdd::model::{InstanceSpec, NoiseMode};
use bpdd::solvers::{basis_pursuit, min_l2_overfit, min_mse};

fn main() -> bpdd::Result<()> {
    let n = 100;
    let base = InstanceSpec {
        n,
        p: 4000,
        s: 1,
        beta_norm: 1.0,
        noise_mode: NoiseMode::ExactNorm,
        noise_level: 0.01,
    };
    let full = base.generate(3)?;
    println!("{:>6} {:>12} {:>12}", "p", "||w_BP||_2", "||w_L2||_2");
    for p in [40, 80, 110, 150, 250, 500, 1000, 2000, 4000] {
        let ts = full.prefix(p)?;
        if p < n {
            let o = min_mse(&ts)?;
            println!(
                "{p:>6} {:>12.5} {:>12.5}   (least squares, p < n)",
                o.model_error_l2, o.model_error_l2
            );
            continue;
        }
        let bp = basis_pursuit(&ts)?;
        let l2 = min_l2_overfit(&ts)?;
        println!("{p:>6} {:>12.5} {:>12.5}", bp.model_error_l2, l2.model_error_l2);
    }
    Ok(())
}
