//! Draw a training set and inspect its pieces.
//!
//! cargo run --example generate_instance

use bpdd::linalg::{mat_vec, norm2};
use bpdd::model::{InstanceSpec, NoiseMode};

fn main() -> bpdd::Result<()> {
    let spec = InstanceSpec {
        n: 50,
        p: 400,
        s: 3,
        beta_norm: 1.0,
        noise_mode: NoiseMode::ExactNorm,
        noise_level: 0.05,
    };
    let ts = spec.generate(7)?;

    println!("n={} p={} s={}", ts.n, ts.p, ts.s);
    println!("beta (scaled, support): {:?}", &ts.truth.beta_scaled[..ts.s]);
    println!("||beta_unscaled||_2 = {:.6}", norm2(&ts.truth.beta_unscaled));
    println!("||eps||_2 = {:.6}", ts.noise.norm());
    println!(
        "column norms of the raw design: {:.3?} ...",
        &ts.design.column_norms[..4]
    );

    // Y = X beta + eps holds exactly.
    let fit = mat_vec(ts.x(), &ts.truth.beta_scaled);
    let gap = fit
        .iter()
        .zip(&ts.noise.values)
        .zip(&ts.observations)
        .map(|((a, e), y)| (a + e - y).abs())
        .fold(0.0, f64::max);
    println!("max |X beta + eps - Y| = {gap:e}");

    // A narrower instance from the same seed is a prefix of this one.
    let narrow = InstanceSpec { p: 100, ..spec }.generate(7)?;
    println!("prefix consistent: {}", narrow == ts.prefix(100)?);

    let gaussian = InstanceSpec {
        noise_mode: NoiseMode::GaussianSigma,
        noise_level: 0.05,
        ..spec
    }
    .generate(7)?;
    println!(
        "gaussian-sigma noise, sigma=0.05: ||eps||_2 = {:.6}",
        gaussian.noise.norm()
    );
    Ok(())
}
