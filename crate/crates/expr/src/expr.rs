//! The expression tree and its smart constructors.
//!
//! Constructors perform only local, always-valid rewrites (flattening, constant
//! folding, dropping neutral elements). No like-term collection is attempted;
//! canonical forms for zero-testing live in [`crate::poly`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Build a rational from machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A node of the expression tree.
#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(Rational),
    Var(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Expr, Expr),
    Pow(Expr, Rational),
    Exp(Expr),
    Log(Expr),
}

/// An immutable, cheaply clonable symbolic expression.
#[derive(Clone, Eq)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl std::hash::Hash for Expr {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    fn new(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(value: Rational) -> Self {
        Expr::new(Node::Const(value))
    }

    pub fn int(value: i64) -> Self {
        Expr::constant(Rational::from_integer(BigInt::from(value)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Expr::constant(rat(num, den))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn var(name: &str) -> Self {
        Expr::new(Node::Var(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_const_zero(&self) -> bool {
        self.as_const().is_some_and(Zero::is_zero)
    }

    pub fn is_const_one(&self) -> bool {
        self.as_const().is_some_and(One::is_one)
    }

    /// Sum with flattening and constant folding.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Rational::zero();
        let mut out = Vec::new();
        let mut stack: Vec<Expr> = terms.into_iter().collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Const(c) => constant += c,
                Node::Add(inner) => stack.extend(inner.iter().rev().cloned()),
                _ => out.push(t),
            }
        }
        if !constant.is_zero() {
            out.push(Expr::constant(constant));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::new(Node::Add(out)),
        }
    }

    /// Product with flattening and constant folding; the folded constant leads.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut constant = Rational::one();
        let mut out = Vec::new();
        let mut stack: Vec<Expr> = factors.into_iter().collect();
        stack.reverse();
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Const(c) => constant *= c,
                Node::Mul(inner) => stack.extend(inner.iter().rev().cloned()),
                _ => out.push(f),
            }
        }
        if constant.is_zero() {
            return Expr::zero();
        }
        if out.is_empty() {
            return Expr::constant(constant);
        }
        if !constant.is_one() {
            out.insert(0, Expr::constant(constant));
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Expr::new(Node::Mul(out))
        }
    }

    /// Quotient `self / den`.
    ///
    /// Panics when `den` is the literal constant zero.
    pub fn quotient(&self, den: &Expr) -> Expr {
        if let Some(c) = den.as_const() {
            assert!(!c.is_zero(), "quotient by the literal constant zero");
            return Expr::product([self.clone(), Expr::constant(c.recip())]);
        }
        if self.is_const_zero() {
            return Expr::zero();
        }
        Expr::new(Node::Div(self.clone(), den.clone()))
    }

    pub fn pow(&self, exponent: Rational) -> Expr {
        if exponent.is_zero() {
            return Expr::one();
        }
        if exponent.is_one() {
            return self.clone();
        }
        match self.node() {
            Node::Const(c) => {
                if c.is_one() {
                    return Expr::one();
                }
                if exponent.is_integer() && !(c.is_zero() && exponent.is_negative()) {
                    return Expr::constant(pow_rational(c, exponent.to_integer().to_i64().unwrap()));
                }
                if c.is_positive() {
                    if let Some(root) = exact_rational_power(c, &exponent) {
                        return Expr::constant(root);
                    }
                }
            }
            Node::Pow(base, inner) if exponent.is_integer() => {
                return base.pow(inner * &exponent);
            }
            _ => {}
        }
        Expr::new(Node::Pow(self.clone(), exponent))
    }

    pub fn powi(&self, exponent: i64) -> Expr {
        self.pow(Rational::from_integer(BigInt::from(exponent)))
    }

    pub fn sqrt(&self) -> Expr {
        self.pow(rat(1, 2))
    }

    pub fn exp(&self) -> Expr {
        if self.is_const_zero() {
            return Expr::one();
        }
        Expr::new(Node::Exp(self.clone()))
    }

    pub fn log(&self) -> Expr {
        if self.is_const_one() {
            return Expr::zero();
        }
        Expr::new(Node::Log(self.clone()))
    }

    /// Every variable or parameter name occurring in the expression.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Var(v) => {
                out.insert(v.to_string());
            }
            Node::Add(ts) | Node::Mul(ts) => ts.iter().for_each(|t| t.collect_symbols(out)),
            Node::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Node::Pow(b, _) | Node::Exp(b) | Node::Log(b) => b.collect_symbols(out),
        }
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Var(v) => &**v == name,
            Node::Add(ts) | Node::Mul(ts) => ts.iter().any(|t| t.contains_symbol(name)),
            Node::Div(a, b) => a.contains_symbol(name) || b.contains_symbol(name),
            Node::Pow(b, _) | Node::Exp(b) | Node::Log(b) => b.contains_symbol(name),
        }
    }

    /// Simultaneous substitution of symbols by expressions.
    pub fn subst_all(&self, map: &BTreeMap<String, Expr>) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(v) => map.get(&**v).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(ts) => Expr::sum(ts.iter().map(|t| t.subst_all(map))),
            Node::Mul(ts) => Expr::product(ts.iter().map(|t| t.subst_all(map))),
            Node::Div(a, b) => {
                let den = b.subst_all(map);
                if den.is_const_zero() {
                    // keep the singular quotient visible instead of panicking
                    Expr::new(Node::Div(a.subst_all(map), den))
                } else {
                    a.subst_all(map).quotient(&den)
                }
            }
            Node::Pow(b, r) => b.subst_all(map).pow(r.clone()),
            Node::Exp(b) => b.subst_all(map).exp(),
            Node::Log(b) => b.subst_all(map).log(),
        }
    }

    pub fn subst(&self, name: &str, value: &Expr) -> Expr {
        let mut map = BTreeMap::new();
        map.insert(name.to_string(), value.clone());
        self.subst_all(&map)
    }

    /// Substitute rational values for the named symbols.
    pub fn bind(&self, values: &BTreeMap<String, Rational>) -> Expr {
        let map = values
            .iter()
            .map(|(k, v)| (k.clone(), Expr::constant(v.clone())))
            .collect();
        self.subst_all(&map)
    }

    /// Number of nodes, counting shared subtrees repeatedly.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Add(ts) | Node::Mul(ts) => ts.iter().map(Expr::size).sum(),
            Node::Div(a, b) => a.size() + b.size(),
            Node::Pow(b, _) | Node::Exp(b) | Node::Log(b) => b.size(),
        }
    }

    /// True when no fractional power, `exp` or `log` occurs.
    pub fn is_rational_function(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Var(_) => true,
            Node::Add(ts) | Node::Mul(ts) => ts.iter().all(Expr::is_rational_function),
            Node::Div(a, b) => a.is_rational_function() && b.is_rational_function(),
            Node::Pow(b, r) => r.is_integer() && b.is_rational_function(),
            Node::Exp(_) | Node::Log(_) => false,
        }
    }
}

pub(crate) fn pow_rational(base: &Rational, exponent: i64) -> Rational {
    let magnitude = exponent.unsigned_abs();
    let mut result = Rational::one();
    let mut b = base.clone();
    let mut e = magnitude;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    if exponent < 0 {
        result.recip()
    } else {
        result
    }
}

/// `base^exponent` when it is again rational (perfect powers only).
pub(crate) fn exact_rational_power(base: &Rational, exponent: &Rational) -> Option<Rational> {
    if !base.is_positive() {
        return None;
    }
    let q = exponent.denom().to_u32()?;
    let p = exponent.numer().to_i64()?;
    let num = exact_root(base.numer(), q)?;
    let den = exact_root(base.denom(), q)?;
    Some(pow_rational(&Rational::new(num, den), p))
}

fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    let r = n.nth_root(q);
    (num_traits::pow(r.clone(), q as usize) == *n).then_some(r)
}

pub(crate) fn is_perfect_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl From<Rational> for Expr {
    fn from(v: Rational) -> Self {
        Expr::constant(v)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, &rhs)
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, rhs)
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, &rhs)
            }
        }
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $trait<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, &Expr::int(rhs))
            }
        }
        impl $trait<i64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, &Expr::int(rhs))
            }
        }
        impl $trait<Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&Expr::int(self), &rhs)
            }
        }
        impl $trait<&Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&Expr::int(self), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::sum([a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::product([a.clone(), b.clone()]));
binop!(Div, div, |a, b| a.quotient(b));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::int(-1), self.clone()])
    }
}

// Printing. The output re-parses to the identical tree.

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

fn const_prec(c: &Rational) -> u8 {
    if c.is_negative() {
        PREC_UNARY
    } else if is_perfect_integer(c) {
        PREC_ATOM
    } else {
        PREC_PRODUCT
    }
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Const(c) => const_prec(c),
            Node::Var(_) | Node::Exp(_) | Node::Log(_) => PREC_ATOM,
            Node::Add(_) => PREC_SUM,
            Node::Mul(fs) => match fs[0].as_const() {
                Some(c) if c.is_negative() => PREC_UNARY,
                _ => PREC_PRODUCT,
            },
            Node::Div(..) => PREC_PRODUCT,
            Node::Pow(..) => PREC_POWER,
        }
    }

    /// For a term printed after ` - `: the negated term, if the term is negative.
    fn negated_for_print(&self) -> Option<Expr> {
        match self.node() {
            Node::Const(c) if c.is_negative() => Some(Expr::constant(-c)),
            Node::Mul(fs) => match fs[0].as_const() {
                Some(c) if c.is_negative() => {
                    let mut rest = fs.clone();
                    rest[0] = Expr::constant(-c);
                    Some(Expr::product(rest))
                }
                _ => None,
            },
            _ => None,
        }
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if is_perfect_integer(r) && !r.is_negative() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "({r})")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(v) => write!(f, "{v}"),
            Node::Add(ts) => {
                write!(f, "{}", ts[0])?;
                for t in &ts[1..] {
                    match t.negated_for_print() {
                        Some(n) => {
                            write!(f, " - ")?;
                            write_wrapped(f, &n, PREC_PRODUCT)?;
                        }
                        None => {
                            write!(f, " + ")?;
                            write_wrapped(f, t, PREC_PRODUCT)?;
                        }
                    }
                }
                Ok(())
            }
            Node::Mul(fs) => {
                let mut rest: &[Expr] = fs;
                if let Some(c) = fs[0].as_const() {
                    if *c == -Rational::one() {
                        write!(f, "-")?;
                    } else {
                        write!(f, "{c}*")?;
                    }
                    rest = &fs[1..];
                }
                for (i, factor) in rest.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write_wrapped(f, factor, PREC_POWER)?;
                }
                Ok(())
            }
            Node::Div(a, b) => {
                write_wrapped(f, a, PREC_PRODUCT)?;
                write!(f, "/")?;
                write_wrapped(f, b, PREC_POWER)
            }
            Node::Pow(b, r) => {
                write_wrapped(f, b, PREC_ATOM)?;
                write!(f, "^")?;
                write_exponent(f, r)
            }
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Log(a) => write!(f, "log({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::erasing_op, clippy::identity_op)]
    fn constructors_fold_constants() {
        let x = Expr::var("x");
        assert_eq!(Expr::int(2) + Expr::int(3), Expr::int(5));
        assert_eq!(&x * 0, Expr::zero());
        assert_eq!(&x * 1, x);
        assert_eq!(&x + 0, x);
        assert_eq!(Expr::int(4).pow(rat(1, 2)), Expr::int(2));
        assert_eq!(Expr::int(2).powi(-2), Expr::ratio(1, 4));
        assert_eq!(x.powi(2).powi(3), x.powi(6));
    }

    #[test]
    fn flattening() {
        let x = Expr::var("x");
        let y = Expr::var("y");
        let e = (&x + &y) + (&x + 1) + 2;
        match e.node() {
            Node::Add(ts) => assert_eq!(ts.len(), 4),
            _ => panic!("expected sum"),
        }
        assert_eq!(e.free_symbols().into_iter().collect::<Vec<_>>(), ["x", "y"]);
    }

    #[test]
    #[should_panic(expected = "literal constant zero")]
    fn quotient_by_literal_zero_panics() {
        let _ = Expr::var("x") / Expr::zero();
    }

    #[test]
    fn display_forms() {
        let x = Expr::var("x");
        let y = Expr::var("y");
        assert_eq!((6 * y.powi(2) + &x).to_string(), "6*y^2 + x");
        assert_eq!((&x - &y).to_string(), "x - y");
        assert_eq!((y.pow(rat(4, 3)) / x.pow(rat(2, 3))).to_string(), "y^(4/3)/x^(2/3)");
        assert_eq!((-&x).to_string(), "-x");
        assert_eq!(((&x + 1) * (&y - 1)).to_string(), "(x + 1)*(y - 1)");
    }

    #[test]
    fn substitution_refolds() {
        let x = Expr::var("x");
        let a = Expr::var("alpha");
        let e = &a * &x + &a;
        let mut m = BTreeMap::new();
        m.insert("alpha".to_string(), Rational::zero());
        assert_eq!(e.bind(&m), Expr::zero());
    }
}
