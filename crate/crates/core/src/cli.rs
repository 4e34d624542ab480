//! Command-line front end behind the `bpdd` binary.
//!
//! Exit codes: 0 success, 1 usage, 2 runtime or solver failure, 3 selftest
//! failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bounds::{bound_ledger, BoundId, BoundValue, ExactValues, LedgerSlot};
use crate::error::{Error, Result};
use crate::experiments::{figure_preset, log_grid, sweep, Estimator, Setting, SweepSpec, PRESETS};
use crate::incoherence::incoherence;
use crate::model::{InstanceSpec, NoiseMode, TrainingSet};
use crate::output::{emit_csv, emit_svg, format_number, read_csv, PlotSpec, XAxis};
use crate::selftest::{selftest, SelftestConfig};
use crate::solvers::{self, InterpolatorOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "bpdd",
    version,
    about = "Double descent of basis pursuit and min-l2 interpolators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one generated instance with the chosen estimators.
    Solve(InstanceArgs),
    /// Evaluate every bound on one generated instance.
    Bounds(InstanceArgs),
    /// Run an inline sweep over n and p.
    Sweep(SweepArgs),
    /// Run a figure preset.
    Figure(FigureArgs),
    /// Run the deterministic invariant suite.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
pub struct NoiseArgs {
    /// Exact noise norm ||eps||_2 (comma list allowed in sweeps).
    #[arg(long, value_delimiter = ',', conflicts_with = "sigma")]
    pub noise_norm: Vec<f64>,
    /// Gaussian noise with entries N(0, sigma^2/n) (comma list allowed in sweeps).
    #[arg(long, value_delimiter = ',')]
    pub sigma: Vec<f64>,
}

impl NoiseArgs {
    fn levels(&self) -> (NoiseMode, Vec<f64>) {
        if !self.sigma.is_empty() {
            (NoiseMode::GaussianSigma, self.sigma.clone())
        } else if !self.noise_norm.is_empty() {
            (NoiseMode::ExactNorm, self.noise_norm.clone())
        } else {
            (NoiseMode::ExactNorm, vec![0.01])
        }
    }
}

#[derive(Args, Debug)]
pub struct InstanceArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta_norm: f64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Subset of bp,min_l2,min_mse,wI.
    #[arg(long, value_delimiter = ',')]
    pub estimators: Vec<String>,
    /// Directory for a one-row CSV of the results.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Comma list of n values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Comma list of values or ranges `a:b:k-log` / `a:b:k-lin`.
    #[arg(long, required = true)]
    pub p: String,
    #[arg(long, value_delimiter = ',', default_values_t = [1])]
    pub s: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
    pub beta_norm: Vec<f64>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "bp")]
    pub estimators: Vec<String>,
    /// Bound identifiers to evaluate per trial.
    #[arg(long, value_delimiter = ',')]
    pub bounds: Vec<String>,
    /// Draw a fresh design for every p instead of nesting prefixes.
    #[arg(long)]
    pub independent_p: bool,
    /// Also compute the incoherence M and K.
    #[arg(long)]
    pub incoherence: bool,
    /// Sorted-correlation count for the empirical bounds.
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, default_value = "sweep")]
    pub name: String,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "csv")]
    pub format: Vec<String>,
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    pub figure: String,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the preset's n values.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Override the preset's p grid.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "csv,svg")]
    pub format: Vec<String>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Replace every comparison tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// Parses `100,200:20000:15-log,50000` into a sorted, deduplicated list.
pub fn parse_p_values(text: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((range, kind)) = item.split_once('-') {
            let parts: Vec<&str> = range.split(':').collect();
            let [a, b, k] = parts[..] else {
                return Err(format!("`{item}`: expected a:b:k-log or a:b:k-lin"));
            };
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| format!("`{item}`: `{s}` is not a count"))
            };
            let (a, b, k) = (num(a)?, num(b)?, num(k)?);
            if a == 0 || b < a || k == 0 {
                return Err(format!("`{item}`: need 0 < a <= b and k >= 1"));
            }
            match kind {
                "log" => out.extend(log_grid(a, b, k)),
                "lin" => out.extend((0..k).map(|i| {
                    if k == 1 {
                        a
                    } else {
                        a + ((b - a) as f64 * i as f64 / (k - 1) as f64).round() as usize
                    }
                })),
                _ => return Err(format!("`{item}`: unknown spacing `{kind}`")),
            }
        } else {
            out.push(item.parse::<usize>().map_err(|_| format!("`{item}` is not a count"))?);
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() || out[0] == 0 {
        return Err("p list must contain positive values".into());
    }
    Ok(out)
}

fn parse_estimators(names: &[String]) -> std::result::Result<Vec<Estimator>, String> {
    names
        .iter()
        .map(|n| Estimator::parse(n).ok_or_else(|| format!("unknown estimator `{n}` (valid: bp, min_l2, min_mse, wI)")))
        .collect()
}

fn parse_bounds(names: &[String]) -> std::result::Result<Vec<BoundId>, String> {
    names
        .iter()
        .map(|n| {
            BoundId::parse(n).ok_or_else(|| {
                let valid: Vec<&str> = BoundId::ALL.iter().map(|b| b.as_str()).collect();
                format!("unknown bound `{n}` (valid: {})", valid.join(", "))
            })
        })
        .collect()
}

struct Formats {
    csv: bool,
    svg: bool,
}

fn parse_formats(list: &[String]) -> std::result::Result<Formats, String> {
    let mut f = Formats { csv: false, svg: false };
    for x in list {
        match x.as_str() {
            "csv" => f.csv = true,
            "svg" => f.svg = true,
            _ => return Err(format!("unknown format `{x}` (valid: csv, svg)")),
        }
    }
    Ok(f)
}

enum Failure {
    Usage(String),
    Runtime(Error),
    Selftest,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
        Err(Failure::Selftest) => EXIT_SELFTEST,
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Solve(a) => solve_cmd(&a, out),
        Command::Bounds(a) => bounds_cmd(&a, out),
        Command::Sweep(a) => {
            let spec = sweep_spec(&a).map_err(Failure::Usage)?;
            let formats = parse_formats(&a.format).map_err(Failure::Usage)?;
            run_and_write(&spec, &a.out, &formats, out)
        }
        Command::Figure(a) => {
            let mut spec = figure_preset(&a.figure).map_err(|e| Failure::Usage(e.to_string()))?;
            if let Some(t) = a.trials {
                spec.trials = t;
            }
            if let Some(s) = a.seed {
                spec.base_seed = s;
            }
            if !a.n.is_empty() {
                spec.n_values = a.n.clone();
                spec.notes.push("n values overridden on the command line".into());
            }
            if let Some(p) = &a.p {
                spec.p_values = parse_p_values(p).map_err(Failure::Usage)?;
                spec.notes.push("p grid overridden on the command line".into());
            }
            let formats = parse_formats(&a.format).map_err(Failure::Usage)?;
            run_and_write(&spec, &a.out, &formats, out)
        }
        Command::Selftest(a) => {
            let report = selftest(&SelftestConfig { tolerance: a.tolerance });
            let _ = write!(out, "{}", report.render());
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Selftest)
            }
        }
    }
}

fn sweep_spec(a: &SweepArgs) -> std::result::Result<SweepSpec, String> {
    let (mode, levels) = a.noise.levels();
    let mut settings = Vec::new();
    for &s in &a.s {
        for &b in &a.beta_norm {
            for &l in &levels {
                settings.push(Setting {
                    s,
                    beta_norm: b,
                    noise_mode: mode,
                    noise_level: l,
                });
            }
        }
    }
    let mut n_values = a.n.clone();
    n_values.sort_unstable();
    n_values.dedup();
    let spec = SweepSpec {
        name: a.name.clone(),
        n_values,
        p_values: parse_p_values(&a.p)?,
        settings,
        trials: a.trials,
        base_seed: a.seed,
        estimators: parse_estimators(&a.estimators)?,
        bounds: parse_bounds(&a.bounds)?,
        incoherence: a.incoherence,
        nested_p: !a.independent_p,
        q: a.q,
        figure_preset: None,
        notes: vec![],
        plots: vec![PlotSpec {
            file_stem: a.name.clone(),
            title: a.name.clone(),
            x: XAxis::P,
            quantities: default_plot_quantities(a),
            log_y: true,
            y_n_power: 0.0,
        }],
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn default_plot_quantities(a: &SweepArgs) -> Vec<String> {
    let mut q = Vec::new();
    for e in &a.estimators {
        match e.as_str() {
            "bp" => q.push("wBP_l2".to_string()),
            "min_l2" => q.push("wL2_l2".to_string()),
            "min_mse" => q.push("wMSE_l2".to_string()),
            "wI" => q.push("wI_l1".to_string()),
            _ => {}
        }
    }
    if q.is_empty() && a.incoherence {
        q.push("M".into());
    }
    q
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn run_and_write(
    spec: &SweepSpec,
    dir: &Path,
    formats: &Formats,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let table = sweep(spec)?;
    create_dir(dir)?;
    let csv_path = dir.join(format!("{}.csv", spec.name));
    // The SVG is drawn from the CSV file, so it is written even when only
    // the plot was requested.
    emit_csv(&table, &csv_path)?;
    let _ = writeln!(out, "wrote {}", csv_path.display());
    if formats.svg {
        let parsed = read_csv(&csv_path)?;
        for plot in &spec.plots {
            let path = dir.join(format!("{}.svg", plot.file_stem));
            emit_svg(&parsed, plot, &path)?;
            let _ = writeln!(out, "wrote {}", path.display());
        }
    }
    if !formats.csv && !formats.svg {
        return Err(Failure::Usage("no output format selected".into()));
    }
    let failures: usize = table.cells.iter().map(|c| c.failures).sum();
    if failures > 0 {
        let _ = writeln!(out, "{failures} trial(s) had solver failures and were excluded");
    }
    Ok(())
}

fn instance(a: &InstanceArgs) -> std::result::Result<TrainingSet, Failure> {
    let (mode, levels) = a.noise.levels();
    if levels.len() != 1 {
        return Err(Failure::Usage("give a single noise level".into()));
    }
    if a.p == 0 || a.n == 0 {
        return Err(Failure::Usage("n and p must be positive".into()));
    }
    let spec = InstanceSpec {
        n: a.n,
        p: a.p,
        s: a.s,
        beta_norm: a.beta_norm,
        noise_mode: mode,
        noise_level: levels[0],
    };
    spec.generate(a.seed).map_err(|e| Failure::Usage(e.to_string()))
}

fn estimator_rows(ts: &TrainingSet, list: &[Estimator]) -> Vec<(Estimator, Result<InterpolatorOutput>)> {
    list.iter()
        .map(|&e| {
            let r = match e {
                Estimator::Bp => solvers::basis_pursuit(ts),
                Estimator::MinL2 => solvers::min_l2_overfit(ts),
                Estimator::MinMse => solvers::min_mse(ts),
                Estimator::Wi => solvers::noise_interpolator(ts),
            };
            (e, r)
        })
        .collect()
}

fn default_estimators(ts: &TrainingSet) -> Vec<Estimator> {
    if ts.p < ts.n {
        vec![Estimator::MinMse]
    } else if ts.noise.norm() > 0.0 && ts.p - ts.s >= ts.n {
        vec![Estimator::Bp, Estimator::MinL2, Estimator::Wi]
    } else {
        vec![Estimator::Bp, Estimator::MinL2]
    }
}

fn solve_cmd(a: &InstanceArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let ts = instance(a)?;
    let list = if a.estimators.is_empty() {
        default_estimators(&ts)
    } else {
        parse_estimators(&a.estimators).map_err(Failure::Usage)?
    };
    let rows = estimator_rows(&ts, &list);
    let header = [
        "estimator",
        "model_error_l2",
        "model_error_l1",
        "model_error_l2_unscaled",
        "nonzeros",
        "residual",
        "iterations",
        "duality_gap",
    ];
    let mut lines = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    let mut first_err = None;
    for (e, r) in rows {
        match r {
            Ok(o) => {
                let (it, gap) = o.solver.as_ref().map_or((String::new(), String::new()), |s| {
                    (s.iterations.to_string(), format_number(s.duality_gap))
                });
                lines.push(vec![
                    e.as_str().to_string(),
                    format_number(o.model_error_l2),
                    format_number(o.model_error_l1),
                    format_number(o.model_error_l2_unscaled),
                    o.nonzero_count.to_string(),
                    format_number(o.residual),
                    it,
                    gap,
                ]);
            }
            Err(err) => {
                let _ = writeln!(out, "{}: {err}", e.as_str());
                first_err.get_or_insert(err);
            }
        }
    }
    emit_rows(&lines, a.out.as_deref(), "solve.csv", out)?;
    match first_err {
        Some(e) => Err(Failure::Runtime(e)),
        None => Ok(()),
    }
}

fn bounds_cmd(a: &InstanceArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let ts = instance(a)?;
    let noisy = ts.noise.norm() > 0.0;
    let wi = if noisy && ts.p - ts.s >= ts.n {
        Some(solvers::noise_interpolator(&ts)?)
    } else {
        None
    };
    let bp = if ts.p >= ts.n {
        Some(solvers::basis_pursuit(&ts)?)
    } else {
        None
    };
    let m = (ts.p >= 2).then(|| incoherence(&ts.design));
    let exact = ExactValues {
        wi_l1: wi.as_ref().map(|o| o.model_error_l1),
        wbp_l1: bp.as_ref().map(|o| o.model_error_l1),
        wbp_l2: bp.as_ref().map(|o| o.model_error_l2),
        m,
    };
    let ledger = bound_ledger(&ts, &exact, None);
    let mut lines = vec![vec![
        "quantity".to_string(),
        "kind".into(),
        "target".into(),
        "value".into(),
        "regime_ok".into(),
        "note".into(),
    ]];
    for (name, v) in [
        ("exact_wI_l1", exact.wi_l1),
        ("exact_wBP_l1", exact.wbp_l1),
        ("exact_wBP_l2", exact.wbp_l2),
        ("exact_M", exact.m),
    ] {
        lines.push(vec![
            name.into(),
            "exact".into(),
            String::new(),
            v.map(format_number).unwrap_or_default(),
            String::new(),
            String::new(),
        ]);
    }
    for (id, slot) in &ledger.entries {
        let row = match slot {
            LedgerSlot::Evaluated(e) => vec![
                id.as_str().into(),
                format!("{:?}", e.kind).to_lowercase(),
                format!("{:?}", e.target),
                match e.value {
                    BoundValue::Finite(v) => format_number(v),
                    BoundValue::Unbounded => "unbounded".into(),
                },
                e.regime_ok.to_string(),
                String::new(),
            ],
            LedgerSlot::NotEvaluable(why) => {
                vec![
                    id.as_str().into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    why.clone(),
                ]
            }
        };
        lines.push(row);
    }
    emit_rows(&lines, a.out.as_deref(), "bounds.csv", out).map_err(Failure::from)
}

fn emit_rows(lines: &[Vec<String>], dir: Option<&Path>, file: &str, out: &mut dyn Write) -> Result<()> {
    let widths: Vec<usize> = (0..lines[0].len())
        .map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0))
        .collect();
    for l in lines {
        let cells: Vec<String> = l.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    if let Some(dir) = dir {
        create_dir(dir)?;
        let path = dir.join(file);
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)?;
        for l in lines {
            w.write_record(l)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("bpdd").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn p_range_syntax() {
        let v = parse_p_values("200:20000:15-log").unwrap();
        assert_eq!((v.len(), v[0], v[14]), (15, 200, 20000));
        assert_eq!(parse_p_values("10,5,10,1:3:3-lin").unwrap(), vec![1, 2, 3, 5, 10]);
        assert!(parse_p_values("1:2").is_err());
        assert!(parse_p_values("1:2:3-cubic").is_err());
        assert!(parse_p_values("0").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = run_str(&["figure", "--figure", "nope"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("fig_M"), "{err}");
        assert_eq!(run_str(&["sweep", "--n", "10", "--p", "20", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(
            run_str(&["sweep", "--n", "10", "--p", "20", "--estimators", "lasso"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_str(&[]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn sweep_spec_from_flags() {
        let cli = Cli::try_parse_from([
            "bpdd",
            "sweep",
            "--n",
            "100",
            "--p",
            "200:20000:15-log",
            "--s",
            "1",
            "--noise-norm",
            "0.01",
            "--trials",
            "20",
            "--seed",
            "42",
        ])
        .unwrap();
        let Command::Sweep(a) = cli.command else { panic!() };
        let spec = sweep_spec(&a).unwrap();
        assert_eq!(spec.p_values.len(), 15);
        assert_eq!((spec.trials, spec.base_seed, spec.settings.len()), (20, 42, 1));
    }

    #[test]
    fn solve_and_bounds_run() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let (code, out, _) = run_str(&["solve", "--n", "8", "--p", "30", "--out", d]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("bp") && dir.path().join("solve.csv").exists());
        let (code, out, _) = run_str(&["bounds", "--n", "8", "--p", "30"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("empirical_ub_wI1_lp"));
        assert_eq!(
            run_str(&["solve", "--n", "8", "--p", "30", "--estimators", "min_mse"]).0,
            EXIT_RUNTIME
        );
    }

    #[test]
    fn figure_writes_csv_and_svg() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let (code, out, err) = run_str(&[
            "figure", "--figure", "fig_wI", "--trials", "2", "--p", "101,201", "--out", d,
        ]);
        assert_eq!(code, EXIT_OK, "{out}{err}");
        let svg = fs::read_to_string(dir.path().join("fig_wI.svg")).unwrap();
        assert!(svg.contains("<polyline"));
        let csv = fs::read_to_string(dir.path().join("fig_wI.csv")).unwrap();
        assert!(csv.lines().any(|l| l.starts_with("n,p,s,trials")));
    }
}
