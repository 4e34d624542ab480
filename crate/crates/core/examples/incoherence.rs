//! Mutual incoherence M of a design and the K factor.
//!
//! cargo run --release --example incoherence

use bpdd::bounds::{eval_bound, BoundId, BoundParams};
use bpdd::incoherence::{incoherence_profile, k_factor};
use bpdd::model::{normalize, sample_design};

fn main() -> bpdd::Result<()> {
    let widths = [500, 1000, 2000, 4000];
    for n in [100, 400] {
        let design = normalize(sample_design(n, 4000, 11))?;
        let profile = incoherence_profile(&design, &widths)?;
        for (&p, &m) in widths.iter().zip(&profile) {
            let params = BoundParams {
                n: Some(n),
                p: Some(p),
                ..Default::default()
            };
            let ub = eval_bound(BoundId::Prop5UbM, &params)?;
            let lb = eval_bound(BoundId::LbM, &params)?;
            println!(
                "n={n:4} p={p:5}  M={m:.4}  bounds [{:.4}, {:.4}]  K(s=1)={:+.3}",
                lb.value.finite().unwrap(),
                ub.value.finite().unwrap(),
                k_factor(m, 1)?
            );
        }
    }
    Ok(())
}
