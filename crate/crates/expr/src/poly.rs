//! Sparse multivariate polynomials over the rationals and unreduced rational forms.
//!
//! Denominators are kept as a multiset of normalized factors so that sums only
//! multiply in the factors they are missing. No gcd is ever computed.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::EvalError;
use crate::expr::{pow_rational, Expr, Node, Rational};

/// A power product `x^a * y^b * ...`, sorted by symbol name, exponents positive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Arc<str>, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(Arc::from(name), 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, name: &str) -> u32 {
        self.0.iter().find(|(v, _)| &**v == name).map_or(0, |(_, e)| *e)
    }

    pub fn factors(&self) -> &[(Arc<str>, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|(v, e)| {
                    let f = other.exponent(v);
                    (f > 0).then(|| (v.clone(), (*e).min(f)))
                })
                .collect(),
        )
    }

    /// `self / other`; requires `other` to divide `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|(v, e)| {
                    let f = other.exponent(v);
                    debug_assert!(f <= *e);
                    (*e > f).then(|| (v.clone(), e - f))
                })
                .collect(),
        )
    }

    fn to_expr(&self) -> Expr {
        Expr::product(self.0.iter().map(|(v, e)| Expr::var(v).powi(i64::from(*e))))
    }
}

/// Sparse polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn var(name: &str) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::var(name), Rational::one());
        p
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::one()).is_some_and(One::is_one)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Greatest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    /// Coefficient of the largest monomial.
    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    pub fn eval_exact(&self, bindings: &BTreeMap<String, Rational>) -> Result<Rational, EvalError> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let x = bindings.get(&**v).ok_or_else(|| EvalError::Unbound(v.to_string()))?;
                t *= pow_rational(x, i64::from(*e));
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, bindings: &BTreeMap<String, f64>) -> Result<f64, EvalError> {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().ok_or(EvalError::NonFinite)?;
            for (v, e) in &m.0 {
                let x = bindings.get(&**v).ok_or_else(|| EvalError::Unbound(v.to_string()))?;
                t *= x.powi(*e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn to_expr(&self) -> Expr {
        Expr::sum(
            self.terms
                .iter()
                .rev()
                .map(|(m, c)| Expr::product([Expr::constant(c.clone()), m.to_expr()])),
        )
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

/// Why [`expand_rational`] produced no rational form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpandError {
    /// A fractional power, `exp` or `log` occurs.
    NotRational(String),
    /// Some denominator expands to the zero polynomial.
    ZeroDenominator,
}

impl fmt::Display for ExpandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpandError::NotRational(s) => write!(f, "not a rational function: {s}"),
            ExpandError::ZeroDenominator => write!(f, "denominator expands to zero"),
        }
    }
}

impl std::error::Error for ExpandError {}

/// `numerator / Π factor^multiplicity` with monic, monomial-free factors or single variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalForm {
    pub numerator: Poly,
    pub den_factors: Vec<(Poly, u32)>,
}

impl RationalForm {
    fn from_poly(p: Poly) -> Self {
        RationalForm {
            numerator: p,
            den_factors: Vec::new(),
        }
    }

    /// The expanded denominator.
    pub fn denominator(&self) -> Poly {
        self.den_factors
            .iter()
            .fold(Poly::one(), |acc, (f, k)| acc.mul(&f.pow(*k)))
    }

    fn multiplicity(&self, f: &Poly) -> u32 {
        self.den_factors.iter().find(|(g, _)| g == f).map_or(0, |(_, k)| *k)
    }

    fn add(&self, other: &RationalForm) -> RationalForm {
        // common denominator: maximum multiplicity of every factor
        let mut common = self.den_factors.clone();
        for (f, k) in &other.den_factors {
            match common.iter_mut().find(|(g, _)| g == f) {
                Some((_, m)) => *m = (*m).max(*k),
                None => common.push((f.clone(), *k)),
            }
        }
        let lift = |r: &RationalForm| {
            common.iter().fold(r.numerator.clone(), |acc, (f, k)| {
                let missing = k - r.multiplicity(f);
                if missing == 0 {
                    acc
                } else {
                    acc.mul(&f.pow(missing))
                }
            })
        };
        let numerator = lift(self).add(&lift(other));
        if numerator.is_zero() {
            return RationalForm::from_poly(Poly::zero());
        }
        RationalForm {
            numerator,
            den_factors: common,
        }
    }

    fn mul(&self, other: &RationalForm) -> RationalForm {
        let numerator = self.numerator.mul(&other.numerator);
        if numerator.is_zero() {
            return RationalForm::from_poly(Poly::zero());
        }
        let mut den = self.den_factors.clone();
        for (f, k) in &other.den_factors {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some((_, m)) => *m += *k,
                None => den.push((f.clone(), *k)),
            }
        }
        RationalForm {
            numerator,
            den_factors: den,
        }
    }

    fn recip(&self) -> Result<RationalForm, ExpandError> {
        if self.numerator.is_zero() {
            return Err(ExpandError::ZeroDenominator);
        }
        let (scale, factors) = normalize_factor(&self.numerator);
        let numerator = self.denominator().scale(&scale.recip());
        let mut den: Vec<(Poly, u32)> = Vec::new();
        for (f, k) in factors {
            match den.iter_mut().find(|(g, _)| *g == f) {
                Some((_, m)) => *m += k,
                None => den.push((f, k)),
            }
        }
        if den.is_empty() {
            return Ok(RationalForm::from_poly(numerator));
        }
        Ok(RationalForm {
            numerator,
            den_factors: den,
        })
    }

    fn powi(&self, n: i64) -> Result<RationalForm, ExpandError> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let k = n.unsigned_abs() as u32;
        Ok(RationalForm {
            numerator: base.numerator.pow(k),
            den_factors: if k == 0 {
                Vec::new()
            } else {
                base.den_factors.iter().map(|(f, m)| (f.clone(), m * k)).collect()
            },
        })
    }

    pub fn to_expr(&self) -> Expr {
        let num = self.numerator.to_expr();
        if self.den_factors.is_empty() {
            num
        } else {
            num.quotient(&self.denominator().to_expr())
        }
    }
}

/// Split `p` into `scale * Π factors`: one factor per variable in the monomial content,
/// and the remaining polynomial made monic.
fn normalize_factor(p: &Poly) -> (Rational, Vec<(Poly, u32)>) {
    let content = p.monomial_content();
    let rest = if content.is_one() {
        p.clone()
    } else {
        Poly {
            terms: p.terms.iter().map(|(m, c)| (m.div(&content), c.clone())).collect(),
        }
    };
    let mut factors: Vec<(Poly, u32)> = content.0.iter().map(|(v, e)| (Poly::var(v), *e)).collect();
    if let Some(c) = rest.as_constant() {
        return (c, factors);
    }
    let lc = rest.leading_coefficient().cloned().unwrap();
    factors.push((rest.scale(&lc.recip()), 1));
    (lc, factors)
}

/// Expand `e` into a rational form by recursive expansion, without gcd reduction.
pub fn expand_rational(e: &Expr) -> Result<RationalForm, ExpandError> {
    match e.node() {
        Node::Const(c) => Ok(RationalForm::from_poly(Poly::constant(c.clone()))),
        Node::Var(v) => Ok(RationalForm::from_poly(Poly::var(v))),
        Node::Add(ts) => {
            let mut acc = RationalForm::from_poly(Poly::zero());
            for t in ts {
                acc = acc.add(&expand_rational(t)?);
            }
            Ok(acc)
        }
        Node::Mul(fs) => {
            let mut acc = RationalForm::from_poly(Poly::one());
            for f in fs {
                acc = acc.mul(&expand_rational(f)?);
                if acc.numerator.is_zero() {
                    // remaining factors still have to be rational and regular
                    for g in fs {
                        expand_rational(g)?;
                    }
                    return Ok(acc);
                }
            }
            Ok(acc)
        }
        Node::Div(a, b) => Ok(expand_rational(a)?.mul(&expand_reciprocal(b)?)),
        Node::Pow(b, r) => {
            if !r.is_integer() {
                return Err(ExpandError::NotRational(e.to_string()));
            }
            let n = r
                .to_integer()
                .to_i64()
                .ok_or_else(|| ExpandError::NotRational(e.to_string()))?;
            expand_rational(b)?.powi(n)
        }
        Node::Exp(_) | Node::Log(_) => Err(ExpandError::NotRational(e.to_string())),
    }
}

/// Expansion of `1/e` that keeps product and power structure, so that factors
/// such as `(x - y)^2` stay recognisable instead of being multiplied out.
fn expand_reciprocal(e: &Expr) -> Result<RationalForm, ExpandError> {
    match e.node() {
        Node::Mul(fs) => {
            let mut acc = RationalForm::from_poly(Poly::one());
            for f in fs {
                acc = acc.mul(&expand_reciprocal(f)?);
            }
            Ok(acc)
        }
        Node::Pow(b, r) if r.is_integer() => {
            let n = r
                .to_integer()
                .to_i64()
                .ok_or_else(|| ExpandError::NotRational(e.to_string()))?;
            if n > 0 {
                expand_reciprocal(b)?.powi(n)
            } else {
                expand_rational(b)?.powi(-n)
            }
        }
        Node::Div(a, b) => Ok(expand_rational(b)?.mul(&expand_reciprocal(a)?)),
        _ => expand_rational(e)?.recip(),
    }
}

/// Expanded `(numerator, denominator)` of `e`.
pub fn numerator_denominator(e: &Expr) -> Result<(Poly, Poly), ExpandError> {
    let f = expand_rational(e)?;
    let d = f.denominator();
    Ok((f.numerator, d))
}
