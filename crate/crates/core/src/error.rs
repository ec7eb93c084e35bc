use thiserror::Error;

use crate::series::QuarterIndex;

/// Errors produced by the estimation and reporting pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed quarter `{0}`: expected YYYYQn")]
    MalformedQuarter(String),
    #[error("quarter {quarter} out of range in `{text}`")]
    QuarterOutOfRange { text: String, quarter: u32 },
    #[error("series must contain at least one value")]
    EmptySeries,
    #[error("nonpositive value {value} at index {index} cannot be log-transformed")]
    NonPositive { index: usize, value: f64 },
    #[error("operation requires a {expected} series, got {actual}")]
    WrongScale {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("series of length {len} is too short (need more than {needed})")]
    TooShort { len: usize, needed: usize },
    #[error("expected {expected} anchor values, got {actual}")]
    AnchorCount { expected: usize, actual: usize },
    #[error("zero denominator at index {0}")]
    ZeroDenominator(usize),
    #[error("realized value or total is zero")]
    ZeroRealized,
    #[error("parameter dimensions do not match order {0}")]
    DimensionMismatch(String),
    #[error("parameters violate stationarity or invertibility")]
    NonStationary,
    #[error("prediction error variance underflow at step {0}")]
    VarianceUnderflow(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no candidate model converged ({attempted} attempted, {skipped} skipped)")]
    NoCandidateConverged { attempted: usize, skipped: usize },
    #[error("model did not converge")]
    NotConverged,
    #[error("calendars are misaligned: expected {expected}, got {actual}")]
    Misaligned {
        expected: QuarterIndex,
        actual: QuarterIndex,
    },
    #[error("{0}")]
    Ingest(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("series {class} / {activity}: {source}")]
    Series {
        class: String,
        activity: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
