//! Run a figure preset at reduced size and print its minima.
//!
//! cargo run --release --example figure_preset -- fig_change_noise 5

use bpdd::experiments::{extract_minima, figure_preset, sweep, PRESETS};

fn main() -> bpdd::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig_change_noise".into());
    let mut spec = figure_preset(&name).inspect_err(|_| eprintln!("presets: {}", PRESETS.join(", ")))?;
    if let Some(t) = args.next() {
        spec.trials = t.parse().expect("trial count");
    }
    println!(
        "{name}: n={:?}, {} p values, {} settings, {} trials",
        spec.n_values,
        spec.p_values.len(),
        spec.settings.len(),
        spec.trials
    );
    for note in &spec.notes {
        println!("note: {note}");
    }
    let table = sweep(&spec)?;
    let quantity = spec
        .plots
        .first()
        .and_then(|p| p.quantities.first())
        .cloned()
        .unwrap_or_else(|| "wBP_l2".into());
    for m in extract_minima(&table, &quantity) {
        println!(
            "{} n={}: min {quantity} = {:.5} at p={}",
            m.curve, m.n, m.min_value, m.p_at_min
        );
    }
    Ok(())
}
