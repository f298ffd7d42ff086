use std::fmt;
use std::io;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by loaders, solvers and the training loop.
#[derive(Debug)]
pub enum Error {
    /// A malformed line in an input file, with its 1-based line number.
    Parse { path: String, line: usize, msg: String },
    /// Dimension or shape inconsistency between inputs.
    Shape(String),
    /// A node id outside the valid range.
    Range(String),
    /// Invalid parameter or configuration value.
    Config(String),
    /// A numeric failure: non-finite values, degenerate denominators,
    /// or a diverging objective.
    Numeric(String),
    /// An iterative solver ran out of iterations; carries the last
    /// residual or marginal violation.
    NonConvergence { what: &'static str, iterations: usize, residual: f64 },
    /// A corrupt or mismatched checkpoint file.
    Checkpoint(String),
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { path, line, msg } => {
                write!(f, "parse error in {path} at line {line}: {msg}")
            }
            Error::Shape(msg) => write!(f, "shape error: {msg}"),
            Error::Range(msg) => write!(f, "range error: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Error::NonConvergence { what, iterations, residual } => write!(
                f,
                "{what} did not converge within {iterations} iterations (residual {residual:.3e})"
            ),
            Error::Checkpoint(msg) => write!(f, "checkpoint error: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}
