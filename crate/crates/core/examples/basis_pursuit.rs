//! Solve basis pursuit and read its certificate.
//!
//! cargo run --release --example basis_pursuit -- [n] [p]

use bpdd::model::{InstanceSpec, NoiseMode};
use bpdd::solvers::basis_pursuit;

fn main() -> bpdd::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(100);
    let p = args.next().unwrap_or(2000);
    let ts = InstanceSpec {
        n,
        p,
        s: 1,
        beta_norm: 1.0,
        noise_mode: NoiseMode::ExactNorm,
        noise_level: 0.01,
    }
    .generate(42)?;

    let bp = basis_pursuit(&ts)?;
    let lp = bp.solver.as_ref().expect("LP result");
    println!("||w_BP||_2 = {:.6}", bp.model_error_l2);
    println!("||w_BP||_1 = {:.6}", bp.model_error_l1);
    println!("||w_BP||_2 in original units = {:.6}", bp.model_error_l2_unscaled);
    println!("nonzeros = {} (n = {n})", bp.nonzero_count);
    println!("simplex iterations = {}", lp.iterations);
    println!(
        "residual = {:.2e}, duality gap = {:.2e}",
        lp.primal_residual, lp.duality_gap
    );
    println!("null risk ||beta||_2 = 1, noise ||eps||_2 = {:.3}", ts.noise.norm());
    Ok(())
}
