use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size: need at least 2 nodes, got {0}")]
    InvalidSize(usize),
    #[error("invalid sparsity {0}: must lie in (0, 1]")]
    InvalidSparsity(f64),
    #[error("invalid graphon: {0}")]
    InvalidGraphon(String),
    #[error("matrix is identically zero")]
    EmptyGraph,
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("degenerate spectrum: leading eigenvalue {0} is not positive")]
    DegenerateSpectrum(f64),
    #[error("invalid bound M = {0}: must lie in (0, 1]")]
    InvalidBound(f64),
    #[error("walk length {0} is odd")]
    OddLength(usize),
    #[error("requested order {requested} exceeds the enumeration budget {cap}")]
    BudgetExceeded { requested: usize, cap: usize },
    #[error("no reference table for order {0}")]
    Unsupported(usize),
    #[error("centrality vector is identically zero")]
    ZeroRegressor,
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("missing components for this test: {0}")]
    MissingComponents(&'static str),
    #[error("invalid level {0}: must lie in (0, 1)")]
    InvalidLevel(f64),
    #[error("attenuation 1 - B = {0} is not positive")]
    NonpositiveAttenuation(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),
    #[error("duplicate edge ({i}, {j}) at row {row}")]
    DuplicateEdge { row: usize, i: usize, j: usize },
    #[error("id mismatch: {0}")]
    IdMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
    }
}
