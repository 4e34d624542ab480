//! Every bound evaluated on one instance next to the exact quantities.
//!
//! cargo run --release --example bound_ledger

use bpdd::bounds::{bound_ledger, ExactValues, LedgerSlot};
use bpdd::incoherence::incoherence;
use bpdd::model::{InstanceSpec, NoiseMode};
use bpdd::solvers::{basis_pursuit, noise_interpolator};

fn main() -> bpdd::Result<()> {
    let ts = InstanceSpec {
        n: 50,
        p: 3000,
        s: 1,
        beta_norm: 1.0,
        noise_mode: NoiseMode::ExactNorm,
        noise_level: 0.01,
    }
    .generate(1)?;
    let bp = basis_pursuit(&ts)?;
    let wi = noise_interpolator(&ts)?;
    let exact = ExactValues {
        wi_l1: Some(wi.model_error_l1),
        wbp_l1: Some(bp.model_error_l1),
        wbp_l2: Some(bp.model_error_l2),
        m: Some(incoherence(&ts.design)),
    };
    println!("exact: {exact:?}");
    for (id, slot) in &bound_ledger(&ts, &exact, None).entries {
        match slot {
            LedgerSlot::Evaluated(e) => {
                println!(
                    "{:24} {:?} {:?} -> {:?} (regime {})",
                    id.as_str(),
                    e.kind,
                    e.target,
                    e.value,
                    e.regime_ok
                )
            }
            LedgerSlot::NotEvaluable(why) => println!("{:24} not evaluable: {why}", id.as_str()),
        }
    }
    Ok(())
}
