//! Evaluation at a point: exact rationals, machine floats and multi-precision floats.

use std::collections::BTreeMap;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::EvalError;
use crate::expr::{exact_rational_power, pow_rational, Expr, Node, Rational};

const RM: RoundingMode = RoundingMode::ToEven;

/// How [`eval`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    /// Binary floating point with the given number of mantissa bits.
    Float {
        precision: usize,
    },
}

/// Result of [`eval`].
#[derive(Debug, Clone)]
pub enum Value {
    Exact(Rational),
    Float(BigFloat),
}

impl Value {
    /// Nearest machine float; only used for reporting.
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(f) => bigfloat_to_f64(f),
        }
    }
}

/// Evaluate `e` with rational bindings in the requested mode.
pub fn eval(e: &Expr, bindings: &BTreeMap<String, Rational>, mode: EvalMode) -> Result<Value, EvalError> {
    match mode {
        EvalMode::Exact => eval_exact(e, bindings).map(Value::Exact),
        EvalMode::Float { precision } => {
            let mut ev = FloatEvaluator::new(precision);
            ev.eval(e, bindings).map(Value::Float)
        }
    }
}

/// Exact evaluation; fractional powers must have perfect-power values, `exp`/`log` must fold.
pub fn eval_exact(e: &Expr, bindings: &BTreeMap<String, Rational>) -> Result<Rational, EvalError> {
    match e.node() {
        Node::Const(c) => Ok(c.clone()),
        Node::Var(v) => bindings
            .get(&**v)
            .cloned()
            .ok_or_else(|| EvalError::Unbound(v.to_string())),
        Node::Add(ts) => ts
            .iter()
            .try_fold(Rational::zero(), |acc, t| Ok(acc + eval_exact(t, bindings)?)),
        Node::Mul(fs) => fs
            .iter()
            .try_fold(Rational::one(), |acc, f| Ok(acc * eval_exact(f, bindings)?)),
        Node::Div(a, b) => {
            let den = eval_exact(b, bindings)?;
            if den.is_zero() {
                return Err(EvalError::DivisionByZero);
            }
            Ok(eval_exact(a, bindings)? / den)
        }
        Node::Pow(b, r) => {
            let base = eval_exact(b, bindings)?;
            if r.is_integer() {
                let n = r.to_integer().to_i64().ok_or(EvalError::NonFinite)?;
                if base.is_zero() && n < 0 {
                    return Err(EvalError::DivisionByZero);
                }
                return Ok(pow_rational(&base, n));
            }
            if base.is_negative() {
                return Err(EvalError::NegativeBase(r.to_string()));
            }
            if base.is_zero() {
                return if r.is_positive() {
                    Ok(Rational::zero())
                } else {
                    Err(EvalError::DivisionByZero)
                };
            }
            exact_rational_power(&base, r).ok_or_else(|| EvalError::NotExact(format!("({base})^({r})")))
        }
        Node::Exp(a) => {
            let v = eval_exact(a, bindings)?;
            if v.is_zero() {
                Ok(Rational::one())
            } else {
                Err(EvalError::NotExact(format!("exp({v})")))
            }
        }
        Node::Log(a) => {
            let v = eval_exact(a, bindings)?;
            if !v.is_positive() {
                Err(EvalError::LogDomain)
            } else if v.is_one() {
                Ok(Rational::zero())
            } else {
                Err(EvalError::NotExact(format!("log({v})")))
            }
        }
    }
}

/// Machine-precision evaluation.
pub fn eval_f64(e: &Expr, bindings: &BTreeMap<String, f64>) -> Result<f64, EvalError> {
    let v = match e.node() {
        Node::Const(c) => c.to_f64().ok_or(EvalError::NonFinite)?,
        Node::Var(v) => *bindings.get(&**v).ok_or_else(|| EvalError::Unbound(v.to_string()))?,
        Node::Add(ts) => ts.iter().try_fold(0.0, |acc, t| Ok(acc + eval_f64(t, bindings)?))?,
        Node::Mul(fs) => fs.iter().try_fold(1.0, |acc, f| Ok(acc * eval_f64(f, bindings)?))?,
        Node::Div(a, b) => {
            let den = eval_f64(b, bindings)?;
            if den == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            eval_f64(a, bindings)? / den
        }
        Node::Pow(b, r) => {
            let base = eval_f64(b, bindings)?;
            if r.is_integer() {
                let n = r.to_integer().to_i32().ok_or(EvalError::NonFinite)?;
                if base == 0.0 && n < 0 {
                    return Err(EvalError::DivisionByZero);
                }
                base.powi(n)
            } else {
                if base < 0.0 {
                    return Err(EvalError::NegativeBase(r.to_string()));
                }
                if base == 0.0 && r.is_negative() {
                    return Err(EvalError::DivisionByZero);
                }
                base.powf(r.to_f64().ok_or(EvalError::NonFinite)?)
            }
        }
        Node::Exp(a) => eval_f64(a, bindings)?.exp(),
        Node::Log(a) => {
            let v = eval_f64(a, bindings)?;
            if v <= 0.0 {
                return Err(EvalError::LogDomain);
            }
            v.ln()
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

/// Multi-precision evaluator holding the constants cache of `astro-float`.
pub struct FloatEvaluator {
    precision: usize,
    consts: Consts,
}

impl FloatEvaluator {
    pub fn new(precision: usize) -> Self {
        FloatEvaluator {
            precision,
            consts: Consts::new().expect("allocating the astro-float constants cache"),
        }
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Convert an exact rational to a float of the working precision.
    pub fn from_rational(&mut self, r: &Rational) -> BigFloat {
        let p = self.precision;
        let n = BigFloat::parse(&r.numer().to_string(), Radix::Dec, p, RM, &mut self.consts);
        if r.denom().is_one() {
            return n;
        }
        let d = BigFloat::parse(&r.denom().to_string(), Radix::Dec, p, RM, &mut self.consts);
        n.div(&d, p, RM)
    }

    /// Convert a decimal literal such as `1e-30`.
    pub fn from_decimal(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.precision, RM, &mut self.consts)
    }

    pub fn eval(&mut self, e: &Expr, bindings: &BTreeMap<String, Rational>) -> Result<BigFloat, EvalError> {
        let mut cache = BTreeMap::new();
        for (k, v) in bindings {
            cache.insert(k.clone(), self.from_rational(v));
        }
        self.eval_with(e, &cache)
    }

    /// Evaluate with bindings that are already multi-precision floats.
    pub fn eval_with(&mut self, e: &Expr, bindings: &BTreeMap<String, BigFloat>) -> Result<BigFloat, EvalError> {
        let p = self.precision;
        let v = match e.node() {
            Node::Const(c) => self.from_rational(c),
            Node::Var(v) => bindings
                .get(&**v)
                .cloned()
                .ok_or_else(|| EvalError::Unbound(v.to_string()))?,
            Node::Add(ts) => {
                let mut acc = BigFloat::from_i64(0, p);
                for t in ts {
                    acc = acc.add(&self.eval_with(t, bindings)?, p, RM);
                }
                acc
            }
            Node::Mul(fs) => {
                let mut acc = BigFloat::from_i64(1, p);
                for f in fs {
                    acc = acc.mul(&self.eval_with(f, bindings)?, p, RM);
                }
                acc
            }
            Node::Div(a, b) => {
                let den = self.eval_with(b, bindings)?;
                if den.is_zero() {
                    return Err(EvalError::DivisionByZero);
                }
                self.eval_with(a, bindings)?.div(&den, p, RM)
            }
            Node::Pow(b, r) => {
                let base = self.eval_with(b, bindings)?;
                self.pow(&base, r)?
            }
            Node::Exp(a) => self.eval_with(a, bindings)?.exp(p, RM, &mut self.consts),
            Node::Log(a) => {
                let v = self.eval_with(a, bindings)?;
                if !v.is_positive() || v.is_zero() {
                    return Err(EvalError::LogDomain);
                }
                v.ln(p, RM, &mut self.consts)
            }
        };
        if v.is_nan() || v.is_inf() {
            Err(EvalError::NonFinite)
        } else {
            Ok(v)
        }
    }

    fn pow(&mut self, base: &BigFloat, r: &Rational) -> Result<BigFloat, EvalError> {
        let p = self.precision;
        if r.is_integer() {
            let n = r.to_integer().to_i64().ok_or(EvalError::NonFinite)?;
            if base.is_zero() {
                return if n < 0 {
                    Err(EvalError::DivisionByZero)
                } else {
                    Ok(BigFloat::from_i64(0, p))
                };
            }
            let m = base.powi(n.unsigned_abs() as usize, p, RM);
            return Ok(if n < 0 { m.reciprocal(p, RM) } else { m });
        }
        if base.is_negative() && !base.is_zero() {
            return Err(EvalError::NegativeBase(r.to_string()));
        }
        if base.is_zero() {
            return if r.is_positive() {
                Ok(BigFloat::from_i64(0, p))
            } else {
                Err(EvalError::DivisionByZero)
            };
        }
        let exponent = self.from_rational(r);
        let log = base.ln(p, RM, &mut self.consts);
        Ok(log.mul(&exponent, p, RM).exp(p, RM, &mut self.consts))
    }

    /// `|v| < threshold`.
    pub fn below(&self, v: &BigFloat, threshold: &BigFloat) -> bool {
        // BigFloat::abs_cmp compares signed values in astro-float 0.9, so take |v| first
        v.abs().cmp(threshold).is_some_and(|c| c < 0)
    }

    pub fn to_f64(&mut self, v: &BigFloat) -> f64 {
        bigfloat_to_f64(v)
    }
}

fn bigfloat_to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let mut cc = match Consts::new() {
        Ok(cc) => cc,
        Err(_) => return f64::NAN,
    };
    // Round to a short mantissa first so the decimal string stays small.
    let mut short = v.clone();
    if short.set_precision(64, RM).is_err() {
        return f64::NAN;
    }
    short
        .format(Radix::Dec, RM, &mut cc)
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .unwrap_or(f64::NAN)
}

/// A flattened machine-float program for fast repeated evaluation.
///
/// Variables are addressed by slot index; domain errors surface as non-finite results.
#[derive(Debug, Clone)]
pub struct Compiled {
    ops: Vec<Op>,
    max_stack: usize,
}

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Slot(usize),
    Add(usize),
    Mul(usize),
    Div,
    Powi(i32),
    Powf(f64),
    Exp,
    Log,
}

impl Compiled {
    /// Compile `e`; every symbol must appear in `slots`.
    pub fn new(e: &Expr, slots: &[&str]) -> Result<Self, EvalError> {
        let mut ops = Vec::new();
        emit(e, slots, &mut ops)?;
        let mut depth = 0usize;
        let mut max_stack = 0usize;
        for op in &ops {
            match op {
                Op::Const(_) | Op::Slot(_) => depth += 1,
                Op::Add(n) | Op::Mul(n) => depth -= n - 1,
                Op::Div => depth -= 1,
                _ => {}
            }
            max_stack = max_stack.max(depth);
        }
        Ok(Compiled { ops, max_stack })
    }

    pub fn eval(&self, args: &[f64]) -> f64 {
        let mut stack: Vec<f64> = Vec::with_capacity(self.max_stack);
        for op in &self.ops {
            match *op {
                Op::Const(c) => stack.push(c),
                Op::Slot(i) => stack.push(args[i]),
                Op::Add(n) => {
                    let at = stack.len() - n;
                    let s: f64 = stack.drain(at..).sum();
                    stack.push(s);
                }
                Op::Mul(n) => {
                    let at = stack.len() - n;
                    let s: f64 = stack.drain(at..).product();
                    stack.push(s);
                }
                Op::Div => {
                    let b = stack.pop().unwrap();
                    let a = stack.last_mut().unwrap();
                    *a /= b;
                }
                Op::Powi(n) => {
                    let a = stack.last_mut().unwrap();
                    *a = a.powi(n);
                }
                Op::Powf(r) => {
                    let a = stack.last_mut().unwrap();
                    *a = if *a < 0.0 { f64::NAN } else { a.powf(r) };
                }
                Op::Exp => {
                    let a = stack.last_mut().unwrap();
                    *a = a.exp();
                }
                Op::Log => {
                    let a = stack.last_mut().unwrap();
                    *a = if *a <= 0.0 { f64::NAN } else { a.ln() };
                }
            }
        }
        stack.pop().unwrap_or(f64::NAN)
    }
}

fn emit(e: &Expr, slots: &[&str], ops: &mut Vec<Op>) -> Result<(), EvalError> {
    match e.node() {
        Node::Const(c) => ops.push(Op::Const(c.to_f64().ok_or(EvalError::NonFinite)?)),
        Node::Var(v) => {
            let i = slots
                .iter()
                .position(|s| *s == &**v)
                .ok_or_else(|| EvalError::Unbound(v.to_string()))?;
            ops.push(Op::Slot(i));
        }
        Node::Add(ts) => {
            for t in ts {
                emit(t, slots, ops)?;
            }
            ops.push(Op::Add(ts.len()));
        }
        Node::Mul(fs) => {
            for f in fs {
                emit(f, slots, ops)?;
            }
            ops.push(Op::Mul(fs.len()));
        }
        Node::Div(a, b) => {
            emit(a, slots, ops)?;
            emit(b, slots, ops)?;
            ops.push(Op::Div);
        }
        Node::Pow(b, r) => {
            emit(b, slots, ops)?;
            if r.is_integer() {
                ops.push(Op::Powi(r.to_integer().to_i32().ok_or(EvalError::NonFinite)?));
            } else {
                ops.push(Op::Powf(r.to_f64().ok_or(EvalError::NonFinite)?));
            }
        }
        Node::Exp(a) => {
            emit(a, slots, ops)?;
            ops.push(Op::Exp);
        }
        Node::Log(a) => {
            emit(a, slots, ops)?;
            ops.push(Op::Log);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;
    use crate::parse::{parse_expr, SymbolTable};

    fn e(s: &str) -> Expr {
        parse_expr(s, &SymbolTable::with_parameters(["a"])).unwrap()
    }

    fn bind(pairs: &[(&str, Rational)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn exact_values() {
        let b = bind(&[("x", rat(1, 1)), ("y", rat(2, 1))]);
        assert_eq!(eval_exact(&e("6*y^2 + x"), &b), Ok(rat(25, 1)));
        let b = bind(&[("x", rat(8, 1)), ("y", rat(27, 1))]);
        assert_eq!(eval_exact(&e("y^(4/3)/x^(2/3)"), &b), Ok(rat(81, 4)));
        let b = bind(&[("y", rat(0, 1))]);
        assert_eq!(eval_exact(&e("1/y"), &b), Err(EvalError::DivisionByZero));
        let b = bind(&[("y", rat(-1, 1))]);
        assert!(matches!(eval_exact(&e("y^(1/3)"), &b), Err(EvalError::NegativeBase(_))));
        let b = bind(&[("y", rat(2, 1))]);
        assert!(matches!(eval_exact(&e("y^(1/2)"), &b), Err(EvalError::NotExact(_))));
        assert_eq!(
            eval_exact(&e("x"), &BTreeMap::new()),
            Err(EvalError::Unbound("x".into()))
        );
    }

    #[test]
    fn float_values() {
        let b = bind(&[("x", rat(1, 1)), ("y", rat(1, 1))]);
        let v = eval(&e("y^(4/3)/x^(2/3)"), &b, EvalMode::Float { precision: 128 }).unwrap();
        assert_eq!(v.to_f64(), 1.0);
        let b = bind(&[("y", rat(2, 1))]);
        let v = eval(&e("log(exp(y))"), &b, EvalMode::Float { precision: 256 }).unwrap();
        assert!((v.to_f64() - 2.0).abs() < 1e-15);
        let v = eval(&e("log(-y)"), &b, EvalMode::Float { precision: 64 });
        assert_eq!(v.unwrap_err(), EvalError::LogDomain);
    }

    #[test]
    fn machine_and_compiled_agree() {
        let expr = e("(x^2 + a*y)^(1/3)/(1 + exp(-x)) - log(y)*x^-2");
        let vals: BTreeMap<String, f64> = [("x", 1.25), ("y", 0.5), ("a", 3.0)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let direct = eval_f64(&expr, &vals).unwrap();
        let c = Compiled::new(&expr, &["x", "y", "a"]).unwrap();
        assert!((c.eval(&[1.25, 0.5, 3.0]) - direct).abs() < 1e-14);
        assert!(c.eval(&[1.25, -0.5, 3.0]).is_nan());
        assert!(Compiled::new(&expr, &["x"]).is_err());
    }
}
