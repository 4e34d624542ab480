//! The noise-only interpolator and its dual certificate.
//!
//! cargo run --release --example noise_interpolator

use bpdd::bounds::sorted_noise_correlations;
use bpdd::model::{InstanceSpec, NoiseMode};
use bpdd::solvers::{dual_value_wI, noise_interpolator};

fn main() -> bpdd::Result<()> {
    let ts = InstanceSpec {
        n: 20,
        p: 1000,
        s: 1,
        beta_norm: 1.0,
        noise_mode: NoiseMode::ExactNorm,
        noise_level: 0.01,
    }
    .generate(5)?;
    let wi = noise_interpolator(&ts)?;
    let lambda = wi.lambda.as_ref().expect("dual multipliers");
    println!("||w_I||_1 = {:.9}", wi.model_error_l1);
    println!("dual value lambda^T(-eps) = {:.9}", dual_value_wI(&ts, lambda)?);

    // The scaled noise direction is feasible for the dual and gives ||eps||^2 / B_(1)^T(-eps).
    let order = sorted_noise_correlations(&ts, 1)?;
    let b1 = order.inner_products[0];
    let trivial: Vec<f64> = ts.noise.values.iter().map(|e| -e / b1).collect();
    println!(
        "trivial dual point: {:.9} (column {})",
        dual_value_wI(&ts, &trivial)?,
        order.indices[0]
    );
    println!("||eps||_2 = {:.9}", ts.noise.norm());
    Ok(())
}
