//! Two-tier zero testing.
//!
//! Rational expressions are expanded and their numerator compared with the zero
//! polynomial. Anything else is evaluated at random positive rational points in
//! multi-precision arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{EvalError, ZeroTestError};
use crate::eval::FloatEvaluator;
use crate::expr::{Expr, Rational};
use crate::poly::{expand_rational, ExpandError};

/// Which decision procedure produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZeroTier {
    Exact,
    Probabilistic,
}

impl fmt::Display for ZeroTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroTier::Exact => f.write_str("exact"),
            ZeroTier::Probabilistic => f.write_str("probabilistic"),
        }
    }
}

/// Outcome of a zero test.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroVerdict {
    pub is_zero: bool,
    pub tier: ZeroTier,
    /// Sample points used (probabilistic tier only).
    pub samples: usize,
    /// Working precision in bits (probabilistic tier only).
    pub precision: usize,
    /// Largest absolute sample value (probabilistic tier only).
    pub max_abs: f64,
}

impl ZeroVerdict {
    fn exact(is_zero: bool) -> Self {
        ZeroVerdict {
            is_zero,
            tier: ZeroTier::Exact,
            samples: 0,
            precision: 0,
            max_abs: 0.0,
        }
    }
}

impl fmt::Display for ZeroVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = if self.is_zero { "zero" } else { "nonzero" };
        match self.tier {
            ZeroTier::Exact => write!(f, "{word} (exact)"),
            ZeroTier::Probabilistic => write!(
                f,
                "{word} (probabilistic, {} points, {} bits, max |v| = {:.3e})",
                self.samples, self.precision, self.max_abs
            ),
        }
    }
}

/// Knobs of the probabilistic tier.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTestConfig {
    pub samples: usize,
    /// Mantissa bits.
    pub precision: usize,
    /// Decimal literal; a value is zero when its magnitude is below this.
    pub threshold: String,
    pub seed: u64,
    /// Sample coordinates lie in `(0, range]`.
    pub range: u32,
    /// Resampling budget as a multiple of `samples`.
    pub attempt_factor: usize,
}

pub const DEFAULT_SEED: u64 = 0x5eed_1a7e;

impl Default for ZeroTestConfig {
    fn default() -> Self {
        ZeroTestConfig {
            samples: 20,
            precision: 256,
            threshold: "1e-30".into(),
            seed: DEFAULT_SEED,
            range: 4,
            attempt_factor: 25,
        }
    }
}

/// Zero test with the default configuration.
pub fn is_zero(e: &Expr) -> Result<ZeroVerdict, ZeroTestError> {
    is_zero_with(e, &ZeroTestConfig::default())
}

/// Exact tier when `e` expands to a rational function, probabilistic otherwise.
pub fn is_zero_with(e: &Expr, cfg: &ZeroTestConfig) -> Result<ZeroVerdict, ZeroTestError> {
    match expand_rational(e) {
        Ok(form) => Ok(ZeroVerdict::exact(form.numerator.is_zero())),
        Err(ExpandError::NotRational(_)) | Err(ExpandError::ZeroDenominator) => is_zero_probabilistic(e, cfg),
    }
}

/// Evaluate at random positive rational points; zero when every value is below threshold.
pub fn is_zero_probabilistic(e: &Expr, cfg: &ZeroTestConfig) -> Result<ZeroVerdict, ZeroTestError> {
    let symbols: Vec<String> = e.free_symbols().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ev = FloatEvaluator::new(cfg.precision);
    let threshold = ev.from_decimal(&cfg.threshold);
    let max_attempts = cfg.samples.max(1) * cfg.attempt_factor.max(1);
    let mut valid = 0;
    let mut attempts = 0;
    let mut all_small = true;
    let mut max_abs = 0.0f64;
    while valid < cfg.samples && attempts < max_attempts {
        attempts += 1;
        let point: BTreeMap<String, Rational> = symbols
            .iter()
            .map(|s| (s.clone(), random_positive(&mut rng, cfg.range)))
            .collect();
        match ev.eval(e, &point) {
            Ok(v) => {
                valid += 1;
                max_abs = max_abs.max(ev.to_f64(&v).abs());
                if !ev.below(&v, &threshold) {
                    all_small = false;
                }
            }
            Err(
                EvalError::DivisionByZero | EvalError::NegativeBase(_) | EvalError::LogDomain | EvalError::NonFinite,
            ) => continue,
            Err(EvalError::Unbound(_) | EvalError::NotExact(_)) => unreachable!("every symbol is sampled"),
        }
    }
    if valid < cfg.samples {
        return Err(ZeroTestError::Inconclusive {
            valid,
            wanted: cfg.samples,
            attempts,
        });
    }
    Ok(ZeroVerdict {
        is_zero: all_small,
        tier: ZeroTier::Probabilistic,
        samples: valid,
        precision: cfg.precision,
        max_abs,
    })
}

/// Uniform-ish rational in `(0, range]` with denominator in `[1024, 2047]`.
fn random_positive(rng: &mut ChaCha8Rng, range: u32) -> Rational {
    let q: i64 = rng.gen_range(1024..2048);
    let p: i64 = rng.gen_range(1..=q * i64::from(range.max(1)));
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_expr, SymbolTable};

    fn e(s: &str) -> Expr {
        parse_expr(s, &SymbolTable::with_parameters(["a"])).unwrap()
    }

    #[test]
    fn exact_tier() {
        let v = is_zero(&e("(x+y)^2 - x^2 - 2*x*y - y^2")).unwrap();
        assert!(v.is_zero);
        assert_eq!(v.tier, ZeroTier::Exact);
        let v = is_zero(&e("1/x + 1/y - (x+y)/(x*y)")).unwrap();
        assert!(v.is_zero && v.tier == ZeroTier::Exact);
        let v = is_zero(&e("x - y")).unwrap();
        assert!(!v.is_zero && v.tier == ZeroTier::Exact);
    }

    #[test]
    fn probabilistic_tier() {
        let v = is_zero(&e("y^(4/3)*x^(-2/3) - (y^2/x)^(2/3)")).unwrap();
        assert!(v.is_zero);
        assert_eq!(v.tier, ZeroTier::Probabilistic);
        assert_eq!(v.samples, 20);
        let v = is_zero(&e("log(x*y) - log(x) - log(y)")).unwrap();
        assert!(v.is_zero);
        let v = is_zero(&e("y^(1/3) - y^(1/3)*(1 + 1/10^20)")).unwrap();
        assert!(!v.is_zero);
    }

    #[test]
    fn singular_everywhere_is_inconclusive() {
        let r = is_zero(&e("(x - x)^(-1/2)"));
        assert!(matches!(r, Err(ZeroTestError::Inconclusive { valid: 0, .. })));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let x = e("x^(1/2)*y - y*x^(1/2) + a^(1/3)");
        let a = is_zero(&x).unwrap();
        let b = is_zero(&x).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_zero);
    }
}
