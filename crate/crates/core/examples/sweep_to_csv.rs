//! A custom sweep written to CSV and drawn as SVG from that CSV.
//!
//! cargo run --release --example sweep_to_csv -- [out_dir]

use std::path::PathBuf;

use bpdd::bounds::BoundId;
use bpdd::experiments::{extract_minima, log_grid, sweep, Estimator, Setting, SweepSpec};
use bpdd::model::NoiseMode;
use bpdd::output::{emit_csv, emit_svg, read_csv, PlotSpec, XAxis};

fn main() -> bpdd::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "results".into()));
    let setting = |e| Setting {
        s: 1,
        beta_norm: 1.0,
        noise_mode: NoiseMode::ExactNorm,
        noise_level: e,
    };
    let spec = SweepSpec {
        name: "example_sweep".into(),
        n_values: vec![40],
        p_values: log_grid(20, 3000, 10),
        settings: vec![setting(0.01), setting(0.05)],
        trials: 10,
        base_seed: 42,
        estimators: vec![Estimator::Bp, Estimator::MinL2],
        bounds: vec![BoundId::LbWbp2],
        incoherence: false,
        nested_p: true,
        q: None,
        figure_preset: None,
        notes: vec![],
        plots: vec![],
    };
    let table = sweep(&spec)?;
    for m in extract_minima(&table, "wBP_l2") {
        println!(
            "{} n={}: min median ||w_BP||_2 = {:.5} at p={}",
            m.curve, m.n, m.min_value, m.p_at_min
        );
    }

    std::fs::create_dir_all(&dir).map_err(|e| bpdd::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let csv_path = dir.join("example_sweep.csv");
    emit_csv(&table, &csv_path)?;
    let plot = PlotSpec {
        file_stem: "example_sweep".into(),
        title: "n=40".into(),
        x: XAxis::P,
        quantities: vec!["wBP_l2".into(), "wL2_l2".into()],
        log_y: true,
        y_n_power: 0.0,
    };
    emit_svg(&read_csv(&csv_path)?, &plot, &dir.join("example_sweep.svg"))?;
    println!("wrote {} and example_sweep.svg", csv_path.display());
    Ok(())
}
