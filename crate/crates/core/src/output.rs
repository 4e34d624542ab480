//! CSV tables and SVG line plots of sweep results.
//!
//! The CSV is the record; plots are drawn from a parsed CSV so that any
//! figure can be regenerated offline from the file alone.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::SweepTable;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XAxis {
    P,
    /// `p - s`, the number of off-support columns.
    PMinusS,
    N,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub file_stem: String,
    pub title: String,
    pub x: XAxis,
    /// Quantities drawn as `<quantity>_median`.
    pub quantities: Vec<String>,
    pub log_y: bool,
    /// Each y value is multiplied by `n^y_n_power`.
    pub y_n_power: f64,
}

/// Shortest round-trip decimal of `v` rounded to 12 significant digits.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let r: f64 = format!("{v:.11e}").parse().unwrap();
    if (1e-5..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

pub const STATS: [&str; 4] = ["median", "mean", "q10", "q90"];

/// Header row for a sweep table.
pub fn csv_header(table: &SweepTable) -> Vec<String> {
    let mut h: Vec<String> = [
        "n",
        "p",
        "s",
        "trials",
        "curve",
        "beta_norm",
        "noise_level",
        "failures",
        "fallback_min_mse",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for q in table.spec.quantities() {
        for st in STATS {
            h.push(format!("{q}_{st}"));
        }
    }
    for b in &table.spec.bounds {
        h.push(format!("{}_violations", b.as_str()));
    }
    h
}

/// Writes the table as CSV with `#` metadata lines.
pub fn write_csv<W: Write>(table: &SweepTable, out: W) -> Result<()> {
    if table.cells.is_empty() {
        return Err(Error::EmptyTable);
    }
    let spec = &table.spec;
    let mut meta = String::new();
    let _ = writeln!(meta, "# bpdd {VERSION}");
    let _ = writeln!(meta, "# preset: {}", spec.figure_preset.as_deref().unwrap_or("none"));
    let _ = writeln!(meta, "# name: {}", spec.name);
    let _ = writeln!(meta, "# seed: {}", spec.base_seed);
    let _ = writeln!(meta, "# trials: {}", spec.trials);
    let _ = writeln!(meta, "# nested_p: {}", spec.nested_p);
    let mode = spec.settings.first().map(|s| s.noise_mode.name()).unwrap_or("none");
    let _ = writeln!(meta, "# noise_mode: {mode}");
    if let Some(q) = spec.q {
        let _ = writeln!(meta, "# q: {q}");
    }
    for note in &spec.notes {
        let _ = writeln!(meta, "# note: {note}");
    }
    let mut out = out;
    out.write_all(meta.as_bytes()).map_err(|e| Error::io("<csv>", e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(csv_header(table))?;
    for c in &table.cells {
        let mut row = vec![
            c.n.to_string(),
            c.p.to_string(),
            c.s.to_string(),
            c.trials.to_string(),
            c.curve.clone(),
            format_number(c.beta_norm),
            format_number(c.noise_level),
            c.failures.to_string(),
            u8::from(c.fallback_min_mse).to_string(),
        ];
        for (_, st) in &c.stats {
            row.push(fmt_opt(st.map(|s| s.median)));
            row.push(fmt_opt(st.map(|s| s.mean)));
            row.push(fmt_opt(st.map(|s| s.q10)));
            row.push(fmt_opt(st.map(|s| s.q90)));
        }
        for (_, v) in &c.violations {
            row.push(v.to_string());
        }
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// A parsed results file: metadata lines, header and string rows.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn number(&self, row: usize, col: usize) -> Option<f64> {
        self.rows[row].get(col).and_then(|v| v.parse().ok())
    }
}

pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let meta: Vec<String> = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim().to_string())
        .collect();
    let body: String = text.lines().skip(meta.len()).map(|l| format!("{l}\n")).collect();
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok(CsvTable { meta, header, rows })
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// One curve per quantity and `(curve, n)` line (or `(curve, p)` when the
/// x-axis is `n`), from the `_median` columns. Blank cells are skipped and
/// lines left with fewer than two points are dropped.
pub fn curves_from_csv(table: &CsvTable, plot: &PlotSpec) -> Result<Vec<Curve>> {
    let need = |name: &str| {
        table
            .column(name)
            .ok_or_else(|| Error::DegeneratePlot(format!("column `{name}` missing from table")))
    };
    let (cn, cp, cs, cc) = (need("n")?, need("p")?, need("s")?, need("curve")?);
    let mut curves: Vec<Curve> = Vec::new();
    for q in &plot.quantities {
        let cq = need(&format!("{q}_median"))?;
        for r in 0..table.rows.len() {
            let (Some(n), Some(p), Some(s)) = (table.number(r, cn), table.number(r, cp), table.number(r, cs)) else {
                continue;
            };
            let Some(y) = table.number(r, cq) else { continue };
            let x = match plot.x {
                XAxis::P => p,
                XAxis::PMinusS => p - s,
                XAxis::N => n,
            };
            let y = y * n.powf(plot.y_n_power);
            if plot.log_y && y <= 0.0 {
                continue;
            }
            let line = match plot.x {
                XAxis::N => format!("p={p}"),
                _ => format!("n={n}"),
            };
            let label = format!("{q} [{} {line}]", table.rows[r][cc]);
            match curves.iter_mut().find(|c| c.label == label) {
                Some(c) => {
                    c.xs.push(x);
                    c.ys.push(y);
                }
                None => curves.push(Curve {
                    label,
                    xs: vec![x],
                    ys: vec![y],
                }),
            }
        }
    }
    curves.retain(|c| c.xs.len() >= 2);
    if curves.is_empty() {
        return Err(Error::DegeneratePlot("no curve has two points".into()));
    }
    Ok(curves)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Standalone SVG with a log10 x-axis.
pub fn render_svg(curves: &[Curve], plot: &PlotSpec) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::DegeneratePlot("nothing to draw".into()));
    }
    for c in curves {
        if c.xs.len() != c.ys.len() {
            return Err(Error::DegeneratePlot(format!(
                "curve `{}` has {} x and {} y values",
                c.label,
                c.xs.len(),
                c.ys.len()
            )));
        }
        if c.xs.len() < 2 {
            return Err(Error::DegeneratePlot(format!(
                "curve `{}` has fewer than two points",
                c.label
            )));
        }
        if c.xs.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::DegeneratePlot(format!(
                "curve `{}` has x values unusable on a log axis",
                c.label
            )));
        }
        if c.ys.iter().any(|y| !y.is_finite() || (plot.log_y && *y <= 0.0)) {
            return Err(Error::DegeneratePlot(format!(
                "curve `{}` has y values unusable on this axis",
                c.label
            )));
        }
    }
    let ty = |y: f64| if plot.log_y { y.log10() } else { y };
    let all_x = curves.iter().flat_map(|c| c.xs.iter().map(|x| x.log10()));
    let (x0, x1) = all_x.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let all_y = curves.iter().flat_map(|c| c.ys.iter().map(|&y| ty(y)));
    let (mut y0, mut y1) = all_y.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if x1 <= x0 {
        return Err(Error::DegeneratePlot("x range is a single point".into()));
    }
    if y1 <= y0 {
        let pad = if y0 == 0.0 { 1.0 } else { y0.abs() * 0.1 };
        y0 -= pad;
        y1 += pad;
    }
    let (w, h) = (720.0, 480.0);
    let (l, r, t, b) = (80.0, 240.0, 40.0, 60.0);
    let px = |x: f64| l + (x.log10() - x0) / (x1 - x0) * (w - l - r);
    let py = |y: f64| h - b - (ty(y) - y0) / (y1 - y0) * (h - t - b);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        (w - r + l) / 2.0,
        escape(&plot.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - l - r,
        h - t - b
    );
    for e in x0.floor() as i32..=x1.ceil() as i32 {
        let xv = 10f64.powi(e);
        if (xv.log10() - x0) < -1e-9 || (xv.log10() - x1) > 1e-9 {
            continue;
        }
        let xp = px(xv);
        let _ = writeln!(
            s,
            r#"<line x1="{xp:.2}" y1="{}" x2="{xp:.2}" y2="{}" stroke="black"/>"#,
            h - b,
            h - b + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{xp:.2}" y="{}" text-anchor="middle">1e{e}</text>"#,
            h - b + 18.0
        );
    }
    for i in 0..=4 {
        let v = y0 + (y1 - y0) * i as f64 / 4.0;
        let yp = h - b - (v - y0) / (y1 - y0) * (h - t - b);
        let label = if plot.log_y {
            format_number(10f64.powf(v))
        } else {
            format_number(v)
        };
        let short: String = label.chars().take(9).collect();
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{yp:.2}" x2="{l}" y2="{yp:.2}" stroke="black"/>"#,
            l - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{short}</text>"#,
            l - 8.0,
            yp + 4.0
        );
    }
    let xlabel = match plot.x {
        XAxis::P => "p",
        XAxis::PMinusS => "p - s",
        XAxis::N => "n",
    };
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel} (log scale)</text>"#,
        (w - r + l) / 2.0,
        h - 15.0
    );
    let ylabel = if plot.log_y { "value (log scale)" } else { "value" };
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{ylabel}</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> =
            c.xs.iter()
                .zip(&c.ys)
                .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = t + 14.0 + 18.0 * i as f64;
        let lx = w - r + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&c.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_svg(table: &CsvTable, plot: &PlotSpec, path: &Path) -> Result<()> {
    let svg = render_svg(&curves_from_csv(table, plot)?, plot)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
