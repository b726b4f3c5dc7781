//! Projective structures: connections, the coefficient map, projective changes
//! and the Liouville flatness invariants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use liouville_expr::{diff, is_zero_with, Expr, Rational, ZeroTestConfig, ZeroVerdict};

use crate::error::{CoreError, Result};

/// Coefficients of `y'' = A3 p^3 + A2 p^2 + A1 p + A0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeCoeffs {
    pub a0: Expr,
    pub a1: Expr,
    pub a2: Expr,
    pub a3: Expr,
}

impl OdeCoeffs {
    pub fn new(a0: Expr, a1: Expr, a2: Expr, a3: Expr) -> Self {
        OdeCoeffs { a0, a1, a2, a3 }
    }

    pub fn zero() -> Self {
        OdeCoeffs::new(Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero())
    }

    pub fn as_array(&self) -> [&Expr; 4] {
        [&self.a0, &self.a1, &self.a2, &self.a3]
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Self {
        OdeCoeffs::new(f(&self.a0), f(&self.a1), f(&self.a2), f(&self.a3))
    }

    /// Substitute rational values for parameters.
    pub fn bind(&self, params: &BTreeMap<String, Rational>) -> Self {
        self.map(|e| e.bind(params))
    }

    /// Symbols other than `x`, `y`, `p`.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in self.as_array() {
            out.extend(a.free_symbols());
        }
        for v in ["x", "y", "p"] {
            out.remove(v);
        }
        out
    }

    /// The right-hand side as a polynomial in `p`.
    pub fn rhs(&self) -> Expr {
        let p = Expr::var("p");
        Expr::sum([
            self.a0.clone(),
            &self.a1 * &p,
            &self.a2 * p.powi(2),
            &self.a3 * p.powi(3),
        ])
    }

    /// Componentwise zero test of `self - other`.
    pub fn compare(&self, other: &OdeCoeffs, cfg: &ZeroTestConfig) -> Result<[ZeroVerdict; 4]> {
        let a = self.as_array();
        let b = other.as_array();
        let mut out = Vec::with_capacity(4);
        for i in 0..4 {
            out.push(is_zero_with(&(a[i] - b[i]), cfg)?);
        }
        Ok(out.try_into().expect("four components"))
    }

    pub fn equals(&self, other: &OdeCoeffs, cfg: &ZeroTestConfig) -> Result<bool> {
        Ok(self.compare(other, cfg)?.iter().all(|v| v.is_zero))
    }
}

impl fmt::Display for OdeCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "A0 = {}, A1 = {}, A2 = {}, A3 = {}",
            self.a0, self.a1, self.a2, self.a3
        )
    }
}

fn lower_index(b: usize, c: usize) -> usize {
    assert!(b < 2 && c < 2, "indices are 0 or 1");
    b + c
}

/// Torsion-free affine connection; only symmetric lower index pairs are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    gamma: [[Expr; 3]; 2],
}

impl Connection {
    /// Components in the order Γ¹₁₁, Γ¹₁₂, Γ¹₂₂, Γ²₁₁, Γ²₁₂, Γ²₂₂.
    pub fn new(g111: Expr, g112: Expr, g122: Expr, g211: Expr, g212: Expr, g222: Expr) -> Self {
        Connection {
            gamma: [[g111, g112, g122], [g211, g212, g222]],
        }
    }

    pub fn zero() -> Self {
        Connection::new(
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
            Expr::zero(),
        )
    }

    /// `Γ^a_bc` with zero-based indices.
    pub fn get(&self, a: usize, b: usize, c: usize) -> &Expr {
        &self.gamma[a][lower_index(b, c)]
    }

    pub fn components(&self) -> [&Expr; 6] {
        let g = &self.gamma;
        [&g[0][0], &g[0][1], &g[0][2], &g[1][0], &g[1][1], &g[1][2]]
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Self {
        let [a, b, c, d, e, g] = self.components();
        Connection::new(f(a), f(b), f(c), f(d), f(e), f(g))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    pub u1: Expr,
    pub u2: Expr,
}

impl OneForm {
    pub fn new(u1: Expr, u2: Expr) -> Self {
        OneForm { u1, u2 }
    }

    /// `d f`.
    pub fn exact(f: &Expr) -> Self {
        OneForm::new(diff(f, "x"), diff(f, "y"))
    }

    pub fn get(&self, i: usize) -> &Expr {
        match i {
            0 => &self.u1,
            1 => &self.u2,
            _ => panic!("one-form index {i} out of range"),
        }
    }
}

/// `E dx^2 + 2F dx dy + G dy^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric2D {
    pub e: Expr,
    pub f: Expr,
    pub g: Expr,
}

impl Metric2D {
    pub fn new(e: Expr, f: Expr, g: Expr) -> Self {
        Metric2D { e, f, g }
    }

    pub fn euclidean() -> Self {
        Metric2D::new(Expr::one(), Expr::zero(), Expr::one())
    }

    /// `g_ab` with zero-based indices.
    pub fn get(&self, a: usize, b: usize) -> &Expr {
        match lower_index(a, b) {
            0 => &self.e,
            1 => &self.f,
            _ => &self.g,
        }
    }

    pub fn determinant(&self) -> Expr {
        &self.e * &self.g - self.f.powi(2)
    }

    pub fn is_degenerate(&self, cfg: &ZeroTestConfig) -> Result<bool> {
        Ok(is_zero_with(&self.determinant(), cfg)?.is_zero)
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Self {
        Metric2D::new(f(&self.e), f(&self.f), f(&self.g))
    }

    /// Pull back along `(x, y) -> (X(x, y), Y(x, y))`, where `self` is written in `x`, `y`
    /// standing for the target coordinates.
    pub fn pullback(&self, big_x: &Expr, big_y: &Expr) -> Self {
        let subst: BTreeMap<String, Expr> = [("x".to_string(), big_x.clone()), ("y".to_string(), big_y.clone())]
            .into_iter()
            .collect();
        let moved = self.map(|c| c.subst_all(&subst));
        let jac = [
            [diff(big_x, "x"), diff(big_x, "y")],
            [diff(big_y, "x"), diff(big_y, "y")],
        ];
        let comp = |a: usize, b: usize| {
            let mut terms = Vec::new();
            for c in 0..2 {
                for d in 0..2 {
                    terms.push(Expr::product([
                        jac[c][a].clone(),
                        jac[d][b].clone(),
                        moved.get(c, d).clone(),
                    ]));
                }
            }
            Expr::sum(terms)
        };
        Metric2D::new(comp(0, 0), comp(0, 1), comp(1, 1))
    }
}

impl fmt::Display for Metric2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E = {}, F = {}, G = {}", self.e, self.f, self.g)
    }
}

const COORDS: [&str; 2] = ["x", "y"];

/// `A0 = -Γ²₁₁`, `A1 = Γ¹₁₁ - 2Γ²₁₂`, `A2 = 2Γ¹₁₂ - Γ²₂₂`, `A3 = Γ¹₂₂`.
pub fn connection_to_coeffs(c: &Connection) -> OdeCoeffs {
    OdeCoeffs::new(
        -c.get(1, 0, 0),
        c.get(0, 0, 0) - 2 * c.get(1, 0, 1),
        2 * c.get(0, 0, 1) - c.get(1, 1, 1),
        c.get(0, 1, 1).clone(),
    )
}

/// `Γ^a_bc + Υ_b δ^a_c + Υ_c δ^a_b`.
pub fn projective_shift(c: &Connection, u: &OneForm) -> Connection {
    let comp = |a: usize, b: usize, cc: usize| {
        let mut terms = vec![c.get(a, b, cc).clone()];
        if a == cc {
            terms.push(u.get(b).clone());
        }
        if a == b {
            terms.push(u.get(cc).clone());
        }
        Expr::sum(terms)
    };
    Connection::new(
        comp(0, 0, 0),
        comp(0, 0, 1),
        comp(0, 1, 1),
        comp(1, 0, 0),
        comp(1, 0, 1),
        comp(1, 1, 1),
    )
}

/// The representative connection Π of the projective class.
pub fn representative_connection(k: &OdeCoeffs) -> Connection {
    let third = Expr::ratio(1, 3);
    Connection::new(
        &third * &k.a1,
        &third * &k.a2,
        k.a3.clone(),
        -&k.a0,
        -(&third * &k.a1),
        -(&third * &k.a2),
    )
}

/// Christoffel symbols of the Levi-Civita connection of `g`.
pub fn levi_civita(g: &Metric2D, cfg: &ZeroTestConfig) -> Result<Connection> {
    let det = g.determinant();
    if is_zero_with(&det, cfg)?.is_zero {
        return Err(CoreError::DegenerateMetric);
    }
    // adjugate of g; the inverse is adj / det
    let adj = [[g.g.clone(), -&g.f], [-&g.f, g.e.clone()]];
    let dg: Vec<Vec<Vec<Expr>>> = (0..2)
        .map(|a| {
            (0..2)
                .map(|b| COORDS.iter().map(|v| diff(g.get(a, b), v)).collect())
                .collect()
        })
        .collect();
    let two_det = 2 * det;
    let comp = |a: usize, b: usize, c: usize| {
        let mut terms = Vec::new();
        for (d, adj_ad) in adj[a].iter().enumerate() {
            let inner = Expr::sum([dg[d][c][b].clone(), dg[d][b][c].clone(), -&dg[b][c][d]]);
            terms.push(adj_ad * inner);
        }
        Expr::sum(terms).quotient(&two_det)
    };
    Ok(Connection::new(
        comp(0, 0, 0),
        comp(0, 0, 1),
        comp(0, 1, 1),
        comp(1, 0, 0),
        comp(1, 0, 1),
        comp(1, 1, 1),
    ))
}

/// The Liouville invariants `(L1, L2)`; both vanish iff the structure is projectively flat.
pub fn liouville_invariants(k: &OdeCoeffs) -> (Expr, Expr) {
    let (a0, a1, a2, a3) = (&k.a0, &k.a1, &k.a2, &k.a3);
    let d = |e: &Expr, v: &str| diff(e, v);
    let dd = |e: &Expr, u: &str, v: &str| diff(&diff(e, u), v);
    let c = Expr::ratio;
    let l1 = Expr::sum([
        c(2, 3) * dd(a1, "x", "y"),
        c(-1, 3) * dd(a2, "x", "x"),
        -dd(a0, "y", "y"),
        a0 * d(a2, "y"),
        a2 * d(a0, "y"),
        -(a3 * d(a0, "x")),
        -2 * (a0 * d(a3, "x")),
        c(-2, 3) * (a1 * d(a1, "y")),
        c(1, 3) * (a1 * d(a2, "x")),
    ]);
    let l2 = Expr::sum([
        c(2, 3) * dd(a2, "x", "y"),
        c(-1, 3) * dd(a1, "y", "y"),
        -dd(a3, "x", "x"),
        -(a3 * d(a1, "x")),
        -(a1 * d(a3, "x")),
        a0 * d(a3, "y"),
        2 * (a3 * d(a0, "y")),
        c(2, 3) * (a2 * d(a2, "x")),
        c(-1, 3) * (a2 * d(a1, "y")),
    ]);
    (l1, l2)
}

/// Zero verdicts for `L1` and `L2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Flatness {
    pub l1: ZeroVerdict,
    pub l2: ZeroVerdict,
}

impl Flatness {
    pub fn is_flat(&self) -> bool {
        self.l1.is_zero && self.l2.is_zero
    }
}

pub fn is_projectively_flat(k: &OdeCoeffs, cfg: &ZeroTestConfig) -> Result<Flatness> {
    let (l1, l2) = liouville_invariants(k);
    Ok(Flatness {
        l1: is_zero_with(&l1, cfg)?,
        l2: is_zero_with(&l2, cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use liouville_expr::{is_zero, parse_expr, SymbolTable, ZeroTier};

    fn e(s: &str) -> Expr {
        parse_expr(s, &SymbolTable::with_parameters(["a", "b"])).unwrap()
    }

    fn zero(x: &Expr) -> bool {
        is_zero(x).unwrap().is_zero
    }

    #[test]
    fn euclidean_metric_has_zero_connection() {
        let c = levi_civita(&Metric2D::euclidean(), &ZeroTestConfig::default()).unwrap();
        assert!(c.components().iter().all(|g| zero(g)));
    }

    #[test]
    fn half_plane_metric() {
        let g = Metric2D::new(e("y"), Expr::zero(), e("y"));
        let c = levi_civita(&g, &ZeroTestConfig::default()).unwrap();
        let expected = [e("0"), e("1/(2*y)"), e("0"), e("-1/(2*y)"), e("0"), e("1/(2*y)")];
        for (got, want) in c.components().iter().zip(expected.iter()) {
            assert!(zero(&(*got - want)), "{got} vs {want}");
        }
        let k = connection_to_coeffs(&c);
        let target = OdeCoeffs::new(e("1/(2*y)"), e("0"), e("1/(2*y)"), e("0"));
        assert!(k.equals(&target, &ZeroTestConfig::default()).unwrap());
    }

    #[test]
    fn degenerate_metric_is_rejected() {
        let g = Metric2D::new(e("x^2"), e("x*y"), e("y^2"));
        assert_eq!(
            levi_civita(&g, &ZeroTestConfig::default()),
            Err(CoreError::DegenerateMetric)
        );
    }

    #[test]
    fn representative_of_painleve_one() {
        let k = OdeCoeffs::new(e("6*y^2 + x"), e("0"), e("0"), e("0"));
        let pi = representative_connection(&k);
        assert!(zero(&(pi.get(1, 0, 0) + e("6*y^2 + x"))));
        for (i, g) in pi.components().iter().enumerate() {
            if i != 3 {
                assert!(zero(g));
            }
        }
    }

    #[test]
    fn flat_model_invariants_vanish() {
        let (l1, l2) = liouville_invariants(&OdeCoeffs::zero());
        assert!(zero(&l1) && zero(&l2));
    }

    #[test]
    fn painleve_one_is_not_flat() {
        let k = OdeCoeffs::new(e("6*y^2 + x"), e("0"), e("0"), e("0"));
        let f = is_projectively_flat(&k, &ZeroTestConfig::default()).unwrap();
        assert!(!f.is_flat());
        assert_eq!(f.l1.tier, ZeroTier::Exact);
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let c = Connection::new(e("x"), e("y"), e("a"), e("x*y"), e("1"), e("b"));
        let s = projective_shift(&c, &OneForm::new(Expr::zero(), Expr::zero()));
        for (u, v) in c.components().iter().zip(s.components().iter()) {
            assert!(zero(&(*u - *v)));
        }
    }

    #[test]
    fn pullback_of_euclidean_along_a_shear() {
        // (x, y) -> (x, x + y) pulls dx^2 + dy^2 back to 2dx^2 + 2dxdy + dy^2
        let g = Metric2D::euclidean().pullback(&e("x"), &e("x + y"));
        assert!(zero(&(&g.e - e("2"))) && zero(&(&g.f - e("1"))) && zero(&(&g.g - e("1"))));
    }
}
