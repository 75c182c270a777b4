use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
/// Row and column indices are stored 0-based and displayed 1-based.
pub enum Error {
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("matrix is not square: row {} has {len} entries, expected {dim}", .row + 1)]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("entry ({}, {}) = {value} is invalid: {reason}", .row + 1, .col + 1)]
    InvalidEntry {
        row: usize,
        col: usize,
        value: f64,
        reason: &'static str,
    },
    #[error("row {} of the matrix is zero", .0 + 1)]
    ZeroRow(usize),
    #[error("column {} of the matrix is zero", .0 + 1)]
    ZeroColumn(usize),
    #[error("matrix is reducible; use the per-component mode")]
    Reducible,
    #[error("matrix has spectral radius 0 (no cycles in its support)")]
    ZeroSpectralRadius,
    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },
    #[error("integer overflow while computing {0}; use the big-integer routine instead")]
    Overflow(&'static str),
    #[error("symbol {symbol} is outside the alphabet 1..={alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("invalid subshift: {0}")]
    InvalidSpec(String),
    #[error("beta must be a finite number greater than 1, got {0}")]
    InvalidBeta(f64),
    #[error("digit {index} of the expansion of 1 is uncertain: beta*x is {distance:e} from an integer")]
    UncertainDigit { index: usize, distance: f64 },
    #[error("digit {needed} of the expansion of 1 is required but only {available} were computed")]
    DigitDepthExceeded { needed: usize, available: usize },
    #[error("the subshift is empty")]
    EmptySubshift,
    #[error("word {0:?} is not admissible")]
    InadmissibleWord(Vec<usize>),
    #[error("invalid trace vector: {0}")]
    InvalidTrace(String),
    #[error("coherent sequence has depth {depth}, at least {needed} is required")]
    InsufficientDepth { depth: usize, needed: usize },
    #[error("linear system is singular")]
    Singular,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
