//! First integrals from Killing vectors and from pairs of Liouville solutions.

use std::fmt;

use liouville_expr::{diff, is_zero_with, Expr, ZeroTestConfig, ZeroVerdict};

use crate::error::{CoreError, Result};
use crate::metrisability::PsiTriple;
use crate::projective::{Metric2D, OdeCoeffs};

/// The vector `K1 ∂x + K2 ∂y`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub k1: Expr,
    pub k2: Expr,
}

impl VectorField {
    pub fn new(k1: Expr, k2: Expr) -> Self {
        VectorField { k1, k2 }
    }

    /// Covector components `g_ab K^b`.
    pub fn lower(&self, g: &Metric2D) -> (Expr, Expr) {
        (&g.e * &self.k1 + &g.f * &self.k2, &g.f * &self.k1 + &g.g * &self.k2)
    }

    /// Whether `other` is a pointwise multiple of `self`.
    pub fn is_parallel_to(&self, other: &VectorField, cfg: &ZeroTestConfig) -> Result<bool> {
        let cross = &self.k1 * &other.k2 - &self.k2 * &other.k1;
        Ok(is_zero_with(&cross, cfg)?.is_zero)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*d/dx + ({})*d/dy", self.k1, self.k2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegralKind {
    RationalInP,
    LinearInP,
}

/// A function of `(x, y, p)` constant along solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegral {
    pub value: Expr,
    pub kind: IntegralKind,
}

impl FirstIntegral {
    pub fn new(value: Expr, kind: IntegralKind) -> Self {
        FirstIntegral { value, kind }
    }

    pub fn rational(value: Expr) -> Self {
        FirstIntegral::new(value, IntegralKind::RationalInP)
    }
}

impl fmt::Display for FirstIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// Components (11), (12), (22) of `∇_(a K_b)`, computed as half the Lie derivative of `g`.
pub fn killing_residual(g: &Metric2D, k: &VectorField) -> [Expr; 3] {
    const V: [&str; 2] = ["x", "y"];
    let kv = [&k.k1, &k.k2];
    let comp = |a: usize, b: usize| {
        let mut terms = Vec::new();
        for c in 0..2 {
            terms.push(kv[c] * diff(g.get(a, b), V[c]));
            terms.push(g.get(c, b) * diff(kv[c], V[a]));
            terms.push(g.get(a, c) * diff(kv[c], V[b]));
        }
        Expr::ratio(1, 2) * Expr::sum(terms)
    };
    [comp(0, 0), comp(0, 1), comp(1, 1)]
}

pub fn check_killing(g: &Metric2D, k: &VectorField, cfg: &ZeroTestConfig) -> Result<[ZeroVerdict; 3]> {
    let [a, b, c] = killing_residual(g, k);
    Ok([is_zero_with(&a, cfg)?, is_zero_with(&b, cfg)?, is_zero_with(&c, cfg)?])
}

/// `I = (E + 2Fp + Gp²) / (K1 + K2 p)²` with `K` lowered by `g`.
pub fn integral_from_killing(g: &Metric2D, k: &VectorField, cfg: &ZeroTestConfig) -> Result<FirstIntegral> {
    if !check_killing(g, k, cfg)?.iter().all(|v| v.is_zero) {
        return Err(CoreError::NotKilling);
    }
    let p = Expr::var("p");
    let (l1, l2) = k.lower(g);
    let den = l1 + l2 * &p;
    if is_zero_with(&den, cfg)?.is_zero {
        return Err(CoreError::VanishingDenominator);
    }
    let num = Expr::sum([g.e.clone(), 2 * (&g.f * &p), &g.g * p.powi(2)]);
    Ok(FirstIntegral::rational(num.quotient(&den.powi(2))))
}

/// Ratio of the quadratic forms of two solutions.
pub fn ratio_integral(s1: &PsiTriple, s2: &PsiTriple, cfg: &ZeroTestConfig) -> Result<FirstIntegral> {
    let den = s2.quadratic_form();
    if is_zero_with(&den, cfg)?.is_zero {
        return Err(CoreError::VanishingDenominator);
    }
    Ok(FirstIntegral::rational(s1.quadratic_form().quotient(&den)))
}

/// Killing vector of the metric of `s_nondeg` built from the rank-one solution `s_deg = ω ⊗ ω`.
///
/// The covector `Δ⁻¹ω` raised with `g = σ/Δ²` is `adj(σ) ω`.
pub fn killing_from_degenerate(s_nondeg: &PsiTriple, s_deg: &PsiTriple, cfg: &ZeroTestConfig) -> Result<VectorField> {
    if !s_nondeg.is_nondegenerate(cfg)? {
        return Err(CoreError::DegeneratePsi);
    }
    if s_deg.is_nondegenerate(cfg)? {
        return Err(CoreError::NotRankOne);
    }
    let omega = if !is_zero_with(s_deg.psi1(), cfg)?.is_zero {
        let w1 = s_deg.psi1().sqrt();
        let w2 = s_deg.psi2().quotient(&w1);
        (w1, w2)
    } else if !is_zero_with(s_deg.psi3(), cfg)?.is_zero {
        (Expr::zero(), s_deg.psi3().sqrt())
    } else {
        return Err(CoreError::NotRankOne);
    };
    let [p1, p2, p3] = s_nondeg.components();
    Ok(VectorField::new(
        p3 * &omega.0 - p2 * &omega.1,
        p1 * &omega.1 - p2 * &omega.0,
    ))
}

/// `∂x I + p ∂y I + (A3 p³ + A2 p² + A1 p + A0) ∂p I`.
pub fn conservation_residual(k: &OdeCoeffs, i: &FirstIntegral) -> Expr {
    let p = Expr::var("p");
    Expr::sum([
        diff(&i.value, "x"),
        &p * diff(&i.value, "y"),
        k.rhs() * diff(&i.value, "p"),
    ])
}

pub fn is_conserved(k: &OdeCoeffs, i: &FirstIntegral, cfg: &ZeroTestConfig) -> Result<ZeroVerdict> {
    Ok(is_zero_with(&conservation_residual(k, i), cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use liouville_expr::{parse_expr, SymbolTable, ZeroTier};

    fn e(s: &str) -> Expr {
        parse_expr(s, &SymbolTable::with_parameters(["a"])).unwrap()
    }

    fn cfg() -> ZeroTestConfig {
        ZeroTestConfig::default()
    }

    #[test]
    fn translation_of_the_plane() {
        let g = Metric2D::euclidean();
        let k = VectorField::new(e("1"), e("0"));
        let i = integral_from_killing(&g, &k, &cfg()).unwrap();
        assert!(is_zero_with(&(&i.value - e("1 + p^2")), &cfg()).unwrap().is_zero);
        let v = is_conserved(&OdeCoeffs::zero(), &i, &cfg()).unwrap();
        assert!(v.is_zero && v.tier == ZeroTier::Exact);
    }

    #[test]
    fn non_killing_field_is_rejected() {
        let g = Metric2D::new(e("y"), e("0"), e("y"));
        let k = VectorField::new(e("0"), e("1"));
        assert!(!check_killing(&g, &k, &cfg()).unwrap().iter().all(|v| v.is_zero));
        assert_eq!(integral_from_killing(&g, &k, &cfg()), Err(CoreError::NotKilling));
    }

    #[test]
    fn ratio_of_equal_solutions_is_one() {
        let s = PsiTriple::new(e("y^(-1/3)"), e("0"), e("y^(-1/3)"));
        let i = ratio_integral(&s, &s, &cfg()).unwrap();
        assert!(is_zero_with(&(&i.value - e("1")), &cfg()).unwrap().is_zero);
    }

    #[test]
    fn rank_two_tensor_is_not_degenerate() {
        let s = PsiTriple::new(e("1"), e("0"), e("1"));
        assert_eq!(killing_from_degenerate(&s, &s, &cfg()), Err(CoreError::NotRankOne));
    }

    #[test]
    fn non_integral_has_nonzero_residual() {
        let k = OdeCoeffs::new(e("6*y^2 + x"), e("0"), e("0"), e("0"));
        let r = conservation_residual(&k, &FirstIntegral::rational(e("x")));
        assert!(is_zero_with(&(r - e("1")), &cfg()).unwrap().is_zero);
    }
}
