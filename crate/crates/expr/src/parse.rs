//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! sum      := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! atom     := integer | ident | func '(' sum ')' | '(' sum ')'
//! func     := 'exp' | 'log' | 'sqrt'
//! exponent := ['-'] integer | '(' ['-'] integer ['/' integer] ')'
//! ```

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::ParseError;
use crate::expr::{Expr, Rational};

/// The identifiers an expression may use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    names: BTreeSet<String>,
}

impl SymbolTable {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SymbolTable {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    /// `x`, `y`, `p` plus the given parameter names.
    pub fn with_parameters<I, S>(params: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut t = SymbolTable::new(["x", "y", "p"]);
        t.names.extend(params.into_iter().map(Into::into));
        t
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    pub fn insert(&mut self, name: impl Into<String>) {
        self.names.insert(name.into());
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// Parse `text` into an expression whose identifiers are all declared in `symbols`.
pub fn parse_expr(text: &str, symbols: &SymbolTable) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        symbols,
    };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parse a rational literal: `3`, `-3`, `2/3`, `-2/3`, or a decimal such as `1e-3` or `0.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Some(Rational::from_integer(n));
    }
    parse_decimal(t)
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let mut value = Rational::from_integer(digits);
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    symbols: &'a SymbolTable,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                acc = Expr::sum([acc, rhs]);
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                acc = Expr::sum([acc, -rhs]);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                acc = Expr::product([acc, rhs]);
            } else if self.eat(b'/') {
                let at = self.pos;
                let rhs = self.unary()?;
                if rhs.is_const_zero() {
                    return Err(ParseError::Syntax {
                        pos: at,
                        msg: "division by literal zero".into(),
                    });
                }
                acc = acc.quotient(&rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let r = self.exponent()?;
            Ok(base.pow(r))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn exponent(&mut self) -> Result<Rational, ParseError> {
        if self.eat(b'(') {
            let negative = self.eat(b'-');
            let num = self.integer()?;
            let den = if self.eat(b'/') {
                let at = self.pos;
                let d = self.integer()?;
                if d.is_zero() {
                    return Err(ParseError::Syntax {
                        pos: at,
                        msg: "zero denominator in exponent".into(),
                    });
                }
                d
            } else {
                BigInt::from(1)
            };
            self.expect(b')')?;
            let r = Rational::new(num, den);
            Ok(if negative { -r } else { r })
        } else {
            let negative = self.eat(b'-');
            let n = Rational::from_integer(self.integer()?);
            Ok(if negative { -n } else { n })
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::constant(Rational::from_integer(self.integer()?))),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let func = match name {
                    "exp" | "log" | "sqrt" => Some(name),
                    _ => None,
                };
                if let Some(func) = func {
                    if self.peek() == Some(b'(') {
                        self.pos += 1;
                        let arg = self.sum()?;
                        self.expect(b')')?;
                        return Ok(match func {
                            "exp" => arg.exp(),
                            "log" => arg.log(),
                            _ => arg.sqrt(),
                        });
                    }
                }
                if !self.symbols.contains(name) {
                    return Err(ParseError::Undeclared {
                        name: name.to_string(),
                        pos: start,
                    });
                }
                Ok(Expr::var(name))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
