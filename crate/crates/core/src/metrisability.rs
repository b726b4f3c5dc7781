//! The Liouville system for compatible metrics and its degenerate branch.

use std::collections::BTreeMap;
use std::fmt;

use liouville_expr::{diff, is_zero_with, rat, Expr, Rational, ZeroTestConfig, ZeroVerdict};

use crate::error::{CoreError, Result};
use crate::mobility::{default_base_point, mobility, MobilityOptions, MobilityReport};
use crate::projective::{is_projectively_flat, Connection, Flatness, Metric2D, OdeCoeffs};

/// A candidate solution `(ψ1, ψ2, ψ3)` together with `Δ = ψ1 ψ3 - ψ2²`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiTriple {
    psi: [Expr; 3],
    delta: Expr,
}

impl PsiTriple {
    pub fn new(psi1: Expr, psi2: Expr, psi3: Expr) -> Self {
        let delta = &psi1 * &psi3 - psi2.powi(2);
        PsiTriple {
            psi: [psi1, psi2, psi3],
            delta,
        }
    }

    /// The degenerate triple `(ψ1, 0, 0)`.
    pub fn degenerate(psi1: Expr) -> Self {
        PsiTriple::new(psi1, Expr::zero(), Expr::zero())
    }

    pub fn psi1(&self) -> &Expr {
        &self.psi[0]
    }

    pub fn psi2(&self) -> &Expr {
        &self.psi[1]
    }

    pub fn psi3(&self) -> &Expr {
        &self.psi[2]
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.psi[0], &self.psi[1], &self.psi[2]]
    }

    pub fn delta(&self) -> &Expr {
        &self.delta
    }

    /// `σ_ab` with zero-based indices.
    pub fn sigma(&self, a: usize, b: usize) -> &Expr {
        &self.psi[a + b]
    }

    pub fn is_nondegenerate(&self, cfg: &ZeroTestConfig) -> Result<bool> {
        Ok(!is_zero_with(&self.delta, cfg)?.is_zero)
    }

    pub fn scale(&self, c: &Expr) -> Self {
        PsiTriple::new(c * &self.psi[0], c * &self.psi[1], c * &self.psi[2])
    }

    /// The quadratic form `ψ1 + 2ψ2 p + ψ3 p²`.
    pub fn quadratic_form(&self) -> Expr {
        let p = Expr::var("p");
        Expr::sum([self.psi[0].clone(), 2 * (&self.psi[1] * &p), &self.psi[2] * p.powi(2)])
    }
}

impl fmt::Display for PsiTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "psi1 = {}, psi2 = {}, psi3 = {}",
            self.psi[0], self.psi[1], self.psi[2]
        )
    }
}

/// Left minus right of the four Liouville equations.
pub fn liouville_residuals(k: &OdeCoeffs, s: &PsiTriple) -> [Expr; 4] {
    let (a0, a1, a2, a3) = (&k.a0, &k.a1, &k.a2, &k.a3);
    let [p1, p2, p3] = s.components();
    let c = Expr::ratio;
    [
        Expr::sum([diff(p1, "x"), c(-2, 3) * a1 * p1, 2 * a0 * p2]),
        Expr::sum([diff(p3, "y"), -2 * a3 * p2, c(2, 3) * a2 * p3]),
        Expr::sum([
            diff(p1, "y"),
            2 * diff(p2, "x"),
            c(-4, 3) * a2 * p1,
            c(2, 3) * a1 * p2,
            2 * a0 * p3,
        ]),
        Expr::sum([
            diff(p3, "x"),
            2 * diff(p2, "y"),
            -2 * a3 * p1,
            c(4, 3) * a1 * p3,
            c(-2, 3) * a2 * p2,
        ]),
    ]
}

/// Zero verdicts for the four residuals.
pub fn check_solution(k: &OdeCoeffs, s: &PsiTriple, cfg: &ZeroTestConfig) -> Result<[ZeroVerdict; 4]> {
    let r = liouville_residuals(k, s);
    Ok([
        is_zero_with(&r[0], cfg)?,
        is_zero_with(&r[1], cfg)?,
        is_zero_with(&r[2], cfg)?,
        is_zero_with(&r[3], cfg)?,
    ])
}

pub fn is_solution(k: &OdeCoeffs, s: &PsiTriple, cfg: &ZeroTestConfig) -> Result<bool> {
    Ok(check_solution(k, s, cfg)?.iter().all(|v| v.is_zero))
}

/// `∂y A1 - 2 ∂x A2`; its vanishing is necessary and sufficient for a degenerate
/// solution with `ψ2 = ψ3 = 0`.
pub fn degenerate_obstruction(k: &OdeCoeffs) -> Expr {
    diff(&k.a1, "y") - 2 * diff(&k.a2, "x")
}

pub fn degenerate_condition(k: &OdeCoeffs, cfg: &ZeroTestConfig) -> Result<ZeroVerdict> {
    Ok(is_zero_with(&degenerate_obstruction(k), cfg)?)
}

/// Residuals of `∂x ψ1 = (2/3) A1 ψ1` and `∂y ψ1 = (4/3) A2 ψ1`.
pub fn verify_degenerate_psi(k: &OdeCoeffs, psi1: &Expr, cfg: &ZeroTestConfig) -> Result<(ZeroVerdict, ZeroVerdict)> {
    let rx = diff(psi1, "x") - Expr::ratio(2, 3) * &k.a1 * psi1;
    let ry = diff(psi1, "y") - Expr::ratio(4, 3) * &k.a2 * psi1;
    Ok((is_zero_with(&rx, cfg)?, is_zero_with(&ry, cfg)?))
}

/// `g = σ / Δ²`.
pub fn psi_to_metric(s: &PsiTriple, cfg: &ZeroTestConfig) -> Result<Metric2D> {
    if !s.is_nondegenerate(cfg)? {
        return Err(CoreError::DegeneratePsi);
    }
    let d2 = s.delta().powi(2);
    Ok(Metric2D::new(
        s.psi1().quotient(&d2),
        s.psi2().quotient(&d2),
        s.psi3().quotient(&d2),
    ))
}

/// Inverse of [`psi_to_metric`]: `σ = g · (det g)^(-2/3)`, taking the real cube root.
pub fn metric_to_psi(g: &Metric2D, cfg: &ZeroTestConfig) -> Result<PsiTriple> {
    let det = g.determinant();
    if is_zero_with(&det, cfg)?.is_zero {
        return Err(CoreError::DegenerateMetric);
    }
    let w = det.powi(2).pow(rat(-1, 3));
    Ok(PsiTriple::new(&w * &g.e, &w * &g.f, &w * &g.g))
}

/// Transport a solution along the point map `(x, y) -> (X(x, y), Y(x, y))`, where `s` is
/// written in `x`, `y` standing for the target coordinates.
///
/// `σ` is a symmetric form of projective weight: `σ' = (det J)^(-4/3) Jᵀ σ J`.
pub fn transform_psi(s: &PsiTriple, big_x: &Expr, big_y: &Expr) -> PsiTriple {
    let subst: BTreeMap<String, Expr> = [("x".to_string(), big_x.clone()), ("y".to_string(), big_y.clone())]
        .into_iter()
        .collect();
    let moved: Vec<Expr> = s.components().iter().map(|c| c.subst_all(&subst)).collect();
    let sigma = |a: usize, b: usize| &moved[a + b];
    let jac = [
        [diff(big_x, "x"), diff(big_x, "y")],
        [diff(big_y, "x"), diff(big_y, "y")],
    ];
    let det = &jac[0][0] * &jac[1][1] - &jac[0][1] * &jac[1][0];
    let weight = det.powi(2).pow(rat(-2, 3));
    let comp = |a: usize, b: usize| {
        let mut terms = Vec::new();
        for c in 0..2 {
            for d in 0..2 {
                terms.push(Expr::product([
                    jac[c][a].clone(),
                    jac[d][b].clone(),
                    sigma(c, d).clone(),
                ]));
            }
        }
        &weight * Expr::sum(terms)
    };
    PsiTriple::new(comp(0, 0), comp(0, 1), comp(1, 1))
}

/// Components (111), (112), (122), (222) of `D_(a σ_bc)` for a connection `d`.
///
/// With `d` the representative connection these equal the Liouville residuals up to the
/// factors 1, 1/3, 1/3, 1.
pub fn killing_tensor_residual(d: &Connection, s: &PsiTriple) -> [Expr; 4] {
    const V: [&str; 2] = ["x", "y"];
    // ∇_a σ_bc
    let nabla = |a: usize, b: usize, c: usize| {
        let mut terms = vec![diff(s.sigma(b, c), V[a])];
        for e in 0..2 {
            terms.push(-(d.get(e, a, b) * s.sigma(e, c)));
            terms.push(-(d.get(e, a, c) * s.sigma(b, e)));
        }
        Expr::sum(terms)
    };
    let sym =
        |a: usize, b: usize, c: usize| Expr::ratio(1, 3) * Expr::sum([nabla(a, b, c), nabla(b, c, a), nabla(c, a, b)]);
    [sym(0, 0, 0), sym(0, 0, 1), sym(0, 1, 1), sym(1, 1, 1)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Metrisable,
    NotMetrisable,
    FlatMetrisable,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Metrisable => "Metrisable",
            Verdict::NotMetrisable => "NotMetrisable",
            Verdict::FlatMetrisable => "FlatMetrisable",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Everything the verdict was based on.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub verdict: Verdict,
    pub flatness: Flatness,
    pub degenerate_condition: ZeroVerdict,
    pub mobility: MobilityReport,
}

/// Bind the parameters, then combine flatness, mobility and the nondegeneracy test.
///
/// `m = 6` must coincide with flatness; a mismatch is reported as inconclusive.
pub fn metrisability_verdict(
    k: &OdeCoeffs,
    params: &BTreeMap<String, Rational>,
    base: Option<(Rational, Rational)>,
    opts: &MobilityOptions,
    cfg: &ZeroTestConfig,
) -> Result<Analysis> {
    let k = k.bind(params);
    if let Some(name) = k.parameters().into_iter().next() {
        return Err(CoreError::UnboundParameter(name));
    }
    let base = match base {
        Some(b) => b,
        None => default_base_point(&k)?,
    };
    let flatness = is_projectively_flat(&k, cfg)?;
    let degenerate = degenerate_condition(&k, cfg)?;
    let report = mobility(&k, base, opts)?;
    let verdict = match report.m {
        None => Verdict::Inconclusive,
        Some(6) if flatness.is_flat() => Verdict::FlatMetrisable,
        Some(6) => Verdict::Inconclusive,
        Some(_) if flatness.is_flat() => Verdict::Inconclusive,
        Some(_) if report.nondegenerate_exists => Verdict::Metrisable,
        Some(_) => Verdict::NotMetrisable,
    };
    Ok(Analysis {
        verdict,
        flatness,
        degenerate_condition: degenerate,
        mobility: report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{connection_to_coeffs, levi_civita, representative_connection};
    use liouville_expr::{is_zero, parse_expr, SymbolTable};

    fn e(s: &str) -> Expr {
        parse_expr(s, &SymbolTable::with_parameters(["alpha", "gamma"])).unwrap()
    }

    fn cfg() -> ZeroTestConfig {
        ZeroTestConfig::default()
    }

    #[test]
    fn constant_psi_solves_flat_system() {
        let s = PsiTriple::new(e("1"), e("0"), e("1"));
        assert!(is_solution(&OdeCoeffs::zero(), &s, &cfg()).unwrap());
        let g = psi_to_metric(&s, &cfg()).unwrap();
        assert!(is_zero(&(&g.e - e("1"))).unwrap().is_zero);
    }

    #[test]
    fn painleve_one_degenerate_solution() {
        let k = OdeCoeffs::new(e("6*y^2 + x"), e("0"), e("0"), e("0"));
        assert!(is_solution(&k, &PsiTriple::degenerate(e("1")), &cfg()).unwrap());
        assert!(!is_solution(&k, &PsiTriple::new(e("1"), e("0"), e("1")), &cfg()).unwrap());
    }

    #[test]
    fn degenerate_psi_is_rejected_by_metric_map() {
        let s = PsiTriple::degenerate(e("y^(2/3)"));
        assert_eq!(psi_to_metric(&s, &cfg()), Err(CoreError::DegeneratePsi));
    }

    #[test]
    fn metric_and_psi_round_trip() {
        let g = Metric2D::new(e("y"), e("0"), e("y"));
        let s = metric_to_psi(&g, &cfg()).unwrap();
        assert!(is_zero(&(s.psi1() - e("y^(-1/3)"))).unwrap().is_zero);
        let back = psi_to_metric(&s, &cfg()).unwrap();
        assert!(is_zero(&(&back.e - &g.e)).unwrap().is_zero);
        let k = connection_to_coeffs(&levi_civita(&g, &cfg()).unwrap());
        assert!(is_solution(&k, &s, &cfg()).unwrap());
    }

    #[test]
    fn killing_form_matches_residuals() {
        let k = OdeCoeffs::new(e("x*y + alpha"), e("y^2"), e("x/(1 + y)"), e("gamma*x"));
        let s = PsiTriple::new(e("x^2 + y"), e("x*y^3"), e("1/(x + 2)"));
        let r = liouville_residuals(&k, &s);
        let t = killing_tensor_residual(&representative_connection(&k), &s);
        let scale = [e("1"), e("3"), e("3"), e("1")];
        let pair = [(0, 0), (2, 1), (3, 2), (1, 3)];
        for (ri, ti) in pair {
            assert!(
                is_zero(&(&r[ri] - &scale[ti] * &t[ti])).unwrap().is_zero,
                "component {ti}"
            );
        }
    }

    #[test]
    fn verdict_for_the_flat_model_and_painleve_one() {
        let opts = MobilityOptions::default();
        let none = BTreeMap::new();
        let a = metrisability_verdict(&OdeCoeffs::zero(), &none, None, &opts, &cfg()).unwrap();
        assert_eq!(a.verdict, Verdict::FlatMetrisable);
        let k = OdeCoeffs::new(e("6*y^2 + x"), e("0"), e("0"), e("0"));
        let a = metrisability_verdict(&k, &none, None, &opts, &cfg()).unwrap();
        assert_eq!(a.verdict, Verdict::NotMetrisable);
        assert_eq!(a.mobility.m, Some(1));
    }

    #[test]
    fn unbound_parameters_are_reported() {
        let k = OdeCoeffs::new(e("alpha*y"), e("0"), e("0"), e("0"));
        let r = metrisability_verdict(&k, &BTreeMap::new(), None, &MobilityOptions::default(), &cfg());
        assert_eq!(r, Err(CoreError::UnboundParameter("alpha".into())));
    }

    #[test]
    fn obstruction_for_first_order_damping() {
        let k = OdeCoeffs::new(e("0"), e("y^2"), e("0"), e("0"));
        assert!(!degenerate_condition(&k, &cfg()).unwrap().is_zero);
    }
}
