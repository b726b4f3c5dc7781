use thiserror::Error;

/// Failure while turning text into an [`Expr`](crate::Expr).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared identifier `{name}` at byte {pos}")]
    Undeclared { name: String, pos: usize },
}

/// Failure while evaluating an expression at a point.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative base raised to fractional power {0}")]
    NegativeBase(String),
    #[error("logarithm of non-positive value")]
    LogDomain,
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("value is not an exact rational: {0}")]
    NotExact(String),
    #[error("non-finite intermediate value")]
    NonFinite,
}

/// Failure of a truncated power-series expansion.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("expansion point is a pole of the expression")]
    Pole,
    #[error("expression is not rational in x and y: {0}")]
    NotRational(String),
    #[error("symbol `{0}` is not an expansion variable; bind parameters first")]
    Unbound(String),
}

/// Failure of the zero test.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZeroTestError {
    #[error("zero test inconclusive: only {valid} of {wanted} sample points were regular after {attempts} attempts")]
    Inconclusive {
        valid: usize,
        wanted: usize,
        attempts: usize,
    },
}
