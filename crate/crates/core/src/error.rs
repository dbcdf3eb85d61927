use thiserror::Error;

/// Errors raised anywhere in the inventory toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variance {variance} does not exceed mean {mean}")]
    VarianceNotAboveMean { mean: f64, variance: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("central reorder point {0} is negative; method requires R0 >= 0")]
    NegativeReorderPoint(i64),

    #[error("unknown wait-time method `{0}`")]
    UnknownMethod(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("demand trace ends at day {available} but horizon is {horizon} days")]
    TraceExhausted { available: u32, horizon: u32 },

    #[error("fill-rate target {target} unreachable: {reason}")]
    TargetUnreachable { target: f64, reason: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("key mismatch: {0}")]
    KeyMismatch(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
