//! Exact symbolic differentiation.

use num_traits::One;

use crate::expr::{Expr, Node, Rational};

/// Partial derivative of `e` with respect to the symbol `v`; every other symbol is constant.
pub fn diff(e: &Expr, v: &str) -> Expr {
    if !e.contains_symbol(v) {
        return Expr::zero();
    }
    match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var(name) => {
            if &**name == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(ts) => Expr::sum(ts.iter().map(|t| diff(t, v))),
        Node::Mul(fs) => {
            let mut terms = Vec::with_capacity(fs.len());
            for (i, f) in fs.iter().enumerate() {
                let df = diff(f, v);
                if df.is_const_zero() {
                    continue;
                }
                let mut factors: Vec<Expr> = fs.clone();
                factors[i] = df;
                terms.push(Expr::product(factors));
            }
            Expr::sum(terms)
        }
        Node::Div(a, b) => {
            let da = diff(a, v);
            let db = diff(b, v);
            if db.is_const_zero() {
                return da.quotient(b);
            }
            let num = Expr::sum([Expr::product([da, b.clone()]), -Expr::product([a.clone(), db])]);
            num.quotient(&b.powi(2))
        }
        Node::Pow(b, r) => {
            let db = diff(b, v);
            let lowered = b.pow(r - Rational::one());
            Expr::product([Expr::constant(r.clone()), lowered, db])
        }
        Node::Exp(a) => Expr::product([e.clone(), diff(a, v)]),
        Node::Log(a) => diff(a, v).quotient(a),
    }
}

/// Repeated partial derivative, e.g. `diff_n(e, &["x", "x", "y"])`.
pub fn diff_n(e: &Expr, vars: &[&str]) -> Expr {
    vars.iter().fold(e.clone(), |acc, v| diff(&acc, v))
}
