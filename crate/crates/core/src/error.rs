use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("{function} overflows at {at}")]
    Overflow { function: &'static str, at: f64 },

    #[error("domain error in {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("{function} did not reach the requested accuracy after {terms} terms")]
    NoConvergence { function: &'static str, terms: usize },

    #[error("failed to bracket zero #{index} of J_{order}")]
    Bracketing { order: f64, index: usize },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("hypergeometric transformation undefined for a={a}, b={b}, c={c}")]
    TransformationUndefined { a: f64, b: f64, c: f64 },

    #[error("quadrature did not converge: estimate {value}, error {error}")]
    Quadrature { value: f64, error: f64 },

    #[error("mesh mismatch: {0}")]
    Mesh(String),

    #[error("{0} out of range")]
    OutOfRange(String),

    #[error("tail estimate unavailable: {0}")]
    Tail(String),

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
