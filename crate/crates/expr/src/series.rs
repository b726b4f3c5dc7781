//! Truncated bivariate Taylor series with exact rational coefficients.

use std::fmt;

use num_traits::{One, ToPrimitive, Zero};

use crate::error::SeriesError;
use crate::expr::{Expr, Node, Rational};

/// Index of the coefficient of `u^i v^j` in graded order.
pub fn monomial_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Number of monomials of total degree at most `order`.
pub fn monomial_count(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// `Σ c_ij u^i v^j` truncated at total degree `order`, where `u = x - x0`, `v = y - y0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series2 {
    order: usize,
    coeffs: Vec<Rational>,
}

impl Series2 {
    pub fn zero(order: usize) -> Self {
        Series2 {
            order,
            coeffs: vec![Rational::zero(); monomial_count(order)],
        }
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Series2::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The local coordinate `u` (`which = 0`) or `v` (`which = 1`) shifted by `c`.
    pub fn coordinate(which: usize, c: Rational, order: usize) -> Self {
        let mut s = Series2::constant(c, order);
        if order > 0 {
            let idx = if which == 0 {
                monomial_index(1, 0)
            } else {
                monomial_index(0, 1)
            };
            s.coeffs[idx] = Rational::one();
        }
        s
    }

    pub fn from_coeffs(order: usize, coeffs: Vec<Rational>) -> Self {
        assert_eq!(coeffs.len(), monomial_count(order));
        Series2 { order, coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `u^i v^j`; zero beyond the truncation order.
    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        if i + j > self.order {
            Rational::zero()
        } else {
            self.coeffs[monomial_index(i, j)].clone()
        }
    }

    pub fn coeff_ref(&self, i: usize, j: usize) -> &Rational {
        &self.coeffs[monomial_index(i, j)]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Drop every term of total degree above `order`.
    pub fn truncate(&self, order: usize) -> Series2 {
        let order = order.min(self.order);
        Series2 {
            order,
            coeffs: self.coeffs[..monomial_count(order)].to_vec(),
        }
    }

    pub fn add(&self, other: &Series2) -> Series2 {
        let order = self.order.min(other.order);
        let coeffs = (0..monomial_count(order))
            .map(|k| &self.coeffs[k] + &other.coeffs[k])
            .collect();
        Series2 { order, coeffs }
    }

    pub fn sub(&self, other: &Series2) -> Series2 {
        let order = self.order.min(other.order);
        let coeffs = (0..monomial_count(order))
            .map(|k| &self.coeffs[k] - &other.coeffs[k])
            .collect();
        Series2 { order, coeffs }
    }

    pub fn scale(&self, c: &Rational) -> Series2 {
        Series2 {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Series2) -> Series2 {
        let order = self.order.min(other.order);
        let mut out = Series2::zero(order);
        for d1 in 0..=order {
            for j1 in 0..=d1 {
                let a = &self.coeffs[monomial_index(d1 - j1, j1)];
                if a.is_zero() {
                    continue;
                }
                for d2 in 0..=order - d1 {
                    for j2 in 0..=d2 {
                        let b = &other.coeffs[monomial_index(d2 - j2, j2)];
                        if b.is_zero() {
                            continue;
                        }
                        out.coeffs[monomial_index(d1 - j1 + d2 - j2, j1 + j2)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Multiplicative inverse; fails when the constant term vanishes.
    pub fn recip(&self) -> Result<Series2, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::Pole);
        }
        let inv0 = c0.recip();
        let mut h = Series2::zero(self.order);
        h.coeffs[0] = inv0.clone();
        for d in 1..=self.order {
            for j in 0..=d {
                let i = d - j;
                let mut acc = Rational::zero();
                for a in 0..=i {
                    for b in 0..=j {
                        if a == 0 && b == 0 {
                            continue;
                        }
                        let f = &self.coeffs[monomial_index(a, b)];
                        if f.is_zero() {
                            continue;
                        }
                        acc += f * &h.coeffs[monomial_index(i - a, j - b)];
                    }
                }
                h.coeffs[monomial_index(i, j)] = -acc * &inv0;
            }
        }
        Ok(h)
    }

    pub fn powi(&self, n: i64) -> Result<Series2, SeriesError> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut result = Series2::constant(Rational::one(), self.order);
        let mut b = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(result)
    }

    /// Partial derivative in `u` (`which = 0`) or `v` (`which = 1`); the order drops by one.
    pub fn derivative(&self, which: usize) -> Series2 {
        if self.order == 0 {
            return Series2::zero(0);
        }
        let order = self.order - 1;
        let mut out = Series2::zero(order);
        for d in 0..=order {
            for j in 0..=d {
                let i = d - j;
                let (src, factor) = if which == 0 {
                    (monomial_index(i + 1, j), i + 1)
                } else {
                    (monomial_index(i, j + 1), j + 1)
                };
                out.coeffs[monomial_index(i, j)] = &self.coeffs[src] * Rational::from_integer(factor.into());
            }
        }
        out
    }
}

impl fmt::Display for Series2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for d in 0..=self.order {
            for j in 0..=d {
                let c = &self.coeffs[monomial_index(d - j, j)];
                if c.is_zero() {
                    continue;
                }
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                write!(f, "({c})")?;
                if d - j > 0 {
                    write!(f, "*u^{}", d - j)?;
                }
                if j > 0 {
                    write!(f, "*v^{j}")?;
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Taylor expansion of `e` about `(x0, y0)` up to total degree `order`.
///
/// Only `x` and `y` may occur; parameters must be bound beforehand.
pub fn series_expand(e: &Expr, point: (&Rational, &Rational), order: usize) -> Result<Series2, SeriesError> {
    match e.node() {
        Node::Const(c) => Ok(Series2::constant(c.clone(), order)),
        Node::Var(v) => match &**v {
            "x" => Ok(Series2::coordinate(0, point.0.clone(), order)),
            "y" => Ok(Series2::coordinate(1, point.1.clone(), order)),
            other => Err(SeriesError::Unbound(other.to_string())),
        },
        Node::Add(ts) => {
            let mut acc = Series2::zero(order);
            for t in ts {
                acc = acc.add(&series_expand(t, point, order)?);
            }
            Ok(acc)
        }
        Node::Mul(fs) => {
            let mut acc = Series2::constant(Rational::one(), order);
            for f in fs {
                acc = acc.mul(&series_expand(f, point, order)?);
            }
            Ok(acc)
        }
        Node::Div(a, b) => {
            let den = series_expand(b, point, order)?.recip()?;
            Ok(series_expand(a, point, order)?.mul(&den))
        }
        Node::Pow(b, r) => {
            if !r.is_integer() {
                return Err(SeriesError::NotRational(e.to_string()));
            }
            let n = r
                .to_integer()
                .to_i64()
                .ok_or_else(|| SeriesError::NotRational(e.to_string()))?;
            series_expand(b, point, order)?.powi(n)
        }
        Node::Exp(_) | Node::Log(_) => Err(SeriesError::NotRational(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;
    use crate::parse::{parse_expr, SymbolTable};

    fn e(s: &str) -> Expr {
        parse_expr(s, &SymbolTable::with_parameters(["a"])).unwrap()
    }

    #[test]
    fn painleve_one_at_origin() {
        let s = series_expand(&e("6*y^2 + x"), (&rat(0, 1), &rat(0, 1)), 2).unwrap();
        assert_eq!(s.coeff(1, 0), rat(1, 1));
        assert_eq!(s.coeff(0, 2), rat(6, 1));
        assert_eq!(s.coeff(0, 0), rat(0, 1));
        assert_eq!(s.coeff(1, 1), rat(0, 1));
    }

    #[test]
    fn reciprocal_about_one() {
        let s = series_expand(&e("1/x"), (&rat(1, 1), &rat(0, 1)), 1).unwrap();
        assert_eq!(s.coeff(0, 0), rat(1, 1));
        assert_eq!(s.coeff(1, 0), rat(-1, 1));
        let s = series_expand(&e("1/x"), (&rat(1, 1), &rat(0, 1)), 4).unwrap();
        assert_eq!(s.coeff(4, 0), rat(1, 1));
    }

    #[test]
    fn poles_and_unbound() {
        assert_eq!(
            series_expand(&e("1/y"), (&rat(3, 1), &rat(0, 1)), 2),
            Err(SeriesError::Pole)
        );
        assert!(matches!(
            series_expand(&e("a*x"), (&rat(0, 1), &rat(0, 1)), 2),
            Err(SeriesError::Unbound(_))
        ));
        assert!(matches!(
            series_expand(&e("x^(1/2)"), (&rat(1, 1), &rat(0, 1)), 2),
            Err(SeriesError::NotRational(_))
        ));
    }

    #[test]
    fn derivative_matches_symbolic() {
        let f = e("(x*y + 2)/(1 - x + y^2)");
        let pt = (&rat(1, 2), &rat(1, 3));
        let s = series_expand(&f, pt, 5).unwrap();
        let dx = series_expand(&crate::diff::diff(&f, "x"), pt, 4).unwrap();
        let dy = series_expand(&crate::diff::diff(&f, "y"), pt, 4).unwrap();
        assert_eq!(s.derivative(0), dx);
        assert_eq!(s.derivative(1), dy);
    }
}
