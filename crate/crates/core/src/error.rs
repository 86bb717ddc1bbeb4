use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature did not converge: estimate {value} with error {err_estimate} after {subdivisions} subdivisions")]
    NonConvergent {
        value: f64,
        err_estimate: f64,
        subdivisions: usize,
    },

    #[error("integrand or objective returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("root finding did not converge on [{lo}, {hi}]")]
    RootNonConvergent { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("mean is not finite: {0}")]
    DivergentMean(String),

    #[error("quantile inversion failed at p = {p}")]
    QuantileFailure { p: f64 },

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("normalization constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("argument outside the domain: {0}")]
    OutOfDomain(String),

    #[error("link density vanishes at u = 1")]
    DegenerateLink,

    #[error("no uncensored observations")]
    AllCensored,

    #[error("likelihood unbounded in coefficient '{coefficient}'; possible separation")]
    SeparationDetected { coefficient: String },

    #[error("optimizer did not converge after {iterations} iterations (gradient max-norm {grad_norm:e})")]
    FitNonConvergent { iterations: usize, grad_norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{p} features would enumerate too many subsets (limit 20)")]
    TooLarge { p: usize },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("missing column '{0}'")]
    MissingColumn(String),

    #[error("column '{column}' has non-positive value {value} at row {row}; cannot log-transform")]
    NonPositiveForLog {
        column: String,
        row: usize,
        value: f64,
    },

    #[error("unknown plot kind '{0}'")]
    InvalidKind(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergent { .. } => "NonConvergent",
            Error::NonFinite { .. } => "NonFinite",
            Error::NoSignChange { .. } => "NoSignChange",
            Error::RootNonConvergent { .. } => "NonConvergent",
            Error::InvalidParam(_) => "InvalidParam",
            Error::DivergentMean(_) => "DivergentMean",
            Error::QuantileFailure { .. } => "QuantileFailure",
            Error::SupportMismatch(_) => "SupportMismatch",
            Error::ConstraintViolated(_) => "ConstraintViolated",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::DegenerateLink => "DegenerateLink",
            Error::AllCensored => "AllCensored",
            Error::SeparationDetected { .. } => "SeparationDetected",
            Error::FitNonConvergent { .. } => "NonConvergent",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::TooLarge { .. } => "TooLarge",
            Error::EmptyInput(_) => "EmptyInput",
            Error::Parse { .. } => "ParseError",
            Error::MissingColumn(_) => "MissingColumn",
            Error::NonPositiveForLog { .. } => "NonPositiveForLog",
            Error::InvalidKind(_) => "InvalidKind",
            Error::Io(_) => "Io",
            Error::Csv(_) => "ParseError",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
