use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column {column} has zero norm")]
    ZeroColumn { column: usize },

    #[error("sparsity s={s} is outside 1..={p}")]
    BadSparsity { s: usize, p: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("design matrix does not have full row rank")]
    RankDeficient,

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("simplex iteration limit {0} reached")]
    IterationLimit(usize),

    #[error("sparsification lost feasibility (residual {residual:.3e} at round {round})")]
    FeasibilityLost { residual: f64, round: usize },

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("dual point is infeasible: |lambda^T A_{index}| = {value:.6}")]
    FeasibilityError { index: usize, value: f64 },

    #[error("brute-force enumeration refused for n={n}, p={p} (limits n<=4, p<=8)")]
    Intractable { n: usize, p: usize },

    #[error("no basic solution of the allowed columns reproduces the target")]
    NoFeasibleBasis,

    #[error("incoherence M={0:e} is degenerate; K is unbounded")]
    DegenerateIncoherence(f64),

    #[error("q={q} is not in 1..={available}")]
    BadQ { q: usize, available: usize },

    #[error("bound {bound} needs parameter `{param}`")]
    MissingParam { bound: &'static str, param: &'static str },

    #[error("bound {bound} is not evaluable: {reason}")]
    DomainError { bound: &'static str, reason: String },

    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),

    #[error("nothing to write: the stats table is empty")]
    EmptyTable,

    #[error("degenerate plot: {0}")]
    DegeneratePlot(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
