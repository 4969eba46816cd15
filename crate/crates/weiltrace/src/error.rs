use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: String },
    #[error("{function} is within {threshold:e} of a zero at {at}")]
    NearZero {
        function: &'static str,
        at: String,
        threshold: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate}, error {error:e})")]
    Quadrature {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },
    #[error("zero data only reaches height {have}; tail bound needs {need}")]
    InsufficientHeight { have: f64, need: f64 },
    #[error("zero scan incomplete near t in [{lo}, {hi}]: found {found}, expected about {expected:.2}")]
    IncompleteScan {
        lo: f64,
        hi: f64,
        found: usize,
        expected: f64,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
