use liouville_expr::{EvalError, SeriesError, ZeroTestError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("metric is degenerate (EG - F^2 vanishes identically)")]
    DegenerateMetric,
    #[error("psi triple is degenerate (delta vanishes identically)")]
    DegeneratePsi,
    #[error("symmetric tensor is not of rank one")]
    NotRankOne,
    #[error("vector field is not a Killing vector of the metric")]
    NotKilling,
    #[error("quadratic form in the denominator vanishes identically")]
    VanishingDenominator,
    #[error(transparent)]
    Zero(#[from] ZeroTestError),
    #[error("base point ({0}) is singular: {1}")]
    SingularBase(String, SeriesError),
    #[error("coefficient is not a rational function of x and y: {0}")]
    NotRationalCoefficients(String),
    #[error("no regular base point found among the first {0} candidates")]
    NoBasePoint(usize),
    #[error("parameter `{0}` must be bound to a rational value")]
    UnboundParameter(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
    #[error("catalog entry `{0}` has no {1}")]
    NotAvailable(String, &'static str),
    #[error("catalog self-check failed: {0}")]
    SelfCheck(String),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("initial point is singular for the equation being integrated")]
    SingularInitialPoint,
    #[error("chart failure: {0}")]
    Chart(String),
    #[error("interval [{0}, {1}] touches a singular point of the Picard-Fuchs equation")]
    SingularInterval(f64, f64),
    #[error("point outside the real chart 0 < y < 1 < x: ({0}, {1})")]
    OutsideChart(f64, f64),
    #[error("quadrature did not converge (estimates {0} and {1})")]
    Quadrature(f64, f64),
    #[error("x = {0} is outside the solved interval")]
    OutsideInterval(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
