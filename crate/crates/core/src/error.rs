use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient data: need at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate bandwidth: median pairwise distance is zero (pass an explicit bandwidth)")]
    DegenerateBandwidth,

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("view length mismatch: view {view} has {found} rows, expected {expected}")]
    ViewLengthMismatch {
        view: usize,
        expected: usize,
        found: usize,
    },

    #[error("regularization kappa = 0 requires the degenerate_ok flag")]
    DegenerateRegularization,

    #[error("component {index} out of range (model has {available})")]
    BadComponent { index: usize, available: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("too many folds: {folds} folds for {n} rows")]
    TooManyFolds { folds: usize, n: usize },

    #[error("multiple kernel CCA needs at least two views, got {got}")]
    NeedTwoViews { got: usize },

    #[error("degenerate denominator: {0} norm of the contaminated run is zero")]
    DegenerateDenominator(&'static str),

    #[error("malformed csv at line {line}{}", col.map(|c| format!(", column {c}")).unwrap_or_default())]
    MalformedCsv { line: usize, col: Option<usize> },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
