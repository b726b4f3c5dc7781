//! Symbolic expressions in `x`, `y`, `p` and named parameters over exact rationals.
//!
//! Parsing, differentiation, rational expansion, zero testing, evaluation and
//! bivariate Taylor series.

pub mod diff;
pub mod error;
pub mod eval;
pub mod expr;
pub mod parse;
pub mod poly;
pub mod series;
pub mod zero;

pub use diff::{diff, diff_n};
pub use error::{EvalError, ParseError, SeriesError, ZeroTestError};
pub use eval::{eval, eval_exact, eval_f64, Compiled, EvalMode, FloatEvaluator, Value};
pub use expr::{rat, Expr, Node, Rational};
pub use parse::{parse_expr, parse_rational, SymbolTable};
pub use poly::{expand_rational, numerator_denominator, ExpandError, Monomial, Poly, RationalForm};
pub use series::{monomial_count, monomial_index, series_expand, Series2};
pub use zero::{is_zero, is_zero_probabilistic, is_zero_with, ZeroTestConfig, ZeroTier, ZeroVerdict, DEFAULT_SEED};
