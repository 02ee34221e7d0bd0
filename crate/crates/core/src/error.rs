use thiserror::Error;

/// Errors raised by the interval statistics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: {reason}")]
    InvalidInterval { lo: f64, hi: f64, reason: &'static str },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("need at least {need} intervals, got {got}")]
    TooFewIntervals { need: usize, got: usize },
    #[error("lower endpoint {0} is outside the support of the model")]
    OutsideSupport(f64),
    #[error("zero-width interval at index {0}: the censored likelihood is identically -inf; widen it slightly or use a point likelihood")]
    ZeroWidth(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported significance level {0} (supported: 0.1, 0.05, 0.025)")]
    UnsupportedAlpha(f64),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{}", .0.join("; "))]
    Validation(Vec<String>),
}

impl Error {
    /// True for failures of an iterative numeric procedure rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
