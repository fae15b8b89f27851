use thiserror::Error;

/// Errors raised by the certifiers, searches and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("order {order} exceeds the cap of {cap}")]
    OrderTooLarge { order: usize, cap: usize },

    #[error("index sets have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration of about {estimated} pairs exceeds the limit of {limit}")]
    InfeasibleEnumeration { estimated: f64, limit: f64 },

    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("no class member found after {attempts} attempts")]
    BudgetExhausted { attempts: usize },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("degree mismatch: deg p = {p}, deg q = {q}, expected deg q = deg p - 1")]
    DegreeMismatch { p: usize, q: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Whether the error comes from a size cap or a search budget rather than
    /// from malformed input.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            Error::OrderTooLarge { .. }
                | Error::InfeasibleEnumeration { .. }
                | Error::BudgetExhausted { .. }
        )
    }
}
