//! Built-in equations, metrics, solutions, Killing vectors, integrals and flat charts.

use std::collections::BTreeMap;
use std::fmt;

use liouville_expr::{is_zero_with, parse_expr, rat, Expr, Rational, SymbolTable, ZeroTestConfig};

use crate::error::{CoreError, Result};
use crate::integrals::{
    check_killing, is_conserved, killing_from_degenerate, ratio_integral, FirstIntegral, IntegralKind, VectorField,
};
use crate::metrisability::{psi_to_metric, transform_psi, verify_degenerate_psi, PsiTriple, Verdict};
use crate::projective::{connection_to_coeffs, levi_civita, Metric2D, OdeCoeffs};

pub const ENTRY_NAMES: [&str; 9] = ["PI", "PII", "PIII", "PIV", "PV", "PVI", "XXXII", "Dini", "Flat"];

const PAINLEVE_PARAMETERS: [&str; 4] = ["alpha", "beta", "gamma", "delta"];

/// Free constants used when none are given.
pub fn default_constants() -> (Rational, Rational) {
    (rat(1, 1), rat(2, 1))
}

fn symbols() -> SymbolTable {
    SymbolTable::with_parameters(PAINLEVE_PARAMETERS.iter().copied().chain(["A", "B"]))
}

fn e(text: &str) -> Expr {
    parse_expr(text, &symbols()).unwrap_or_else(|err| panic!("catalog formula `{text}`: {err}"))
}

fn known(name: &str) -> Result<&'static str> {
    ENTRY_NAMES
        .iter()
        .find(|n| **n == name)
        .copied()
        .ok_or_else(|| CoreError::UnknownEntry(name.to_string()))
}

pub fn parameter_names(name: &str) -> Result<&'static [&'static str]> {
    Ok(match known(name)? {
        "PII" => &PAINLEVE_PARAMETERS[..1],
        "PIV" => &PAINLEVE_PARAMETERS[..2],
        "PIII" | "PV" | "PVI" => &PAINLEVE_PARAMETERS[..],
        _ => &[],
    })
}

/// The equation with its parameters left symbolic.
pub fn symbolic_equation(name: &str) -> Result<OdeCoeffs> {
    let k = |a0: &str, a1: &str, a2: &str, a3: &str| OdeCoeffs::new(e(a0), e(a1), e(a2), e(a3));
    Ok(match known(name)? {
        "PI" => k("6*y^2 + x", "0", "0", "0"),
        "PII" => k("2*y^3 + x*y + alpha", "0", "0", "0"),
        "PIII" => k("alpha*y^2/x + beta/x + gamma*y^3 + delta/y", "-1/x", "1/y", "0"),
        "PIV" => k("3/2*y^3 + 4*x*y^2 + 2*(x^2 - alpha)*y + beta/y", "0", "1/(2*y)", "0"),
        "PV" => k(
            "(y - 1)^2/x^2*(alpha*y + beta/y) + gamma*y/x + delta*y*(y + 1)/(y - 1)",
            "-1/x",
            "1/(2*y) + 1/(y - 1)",
            "0",
        ),
        "PVI" => k(
            "y*(y - 1)*(y - x)/(x^2*(x - 1)^2)*(alpha + beta*x/y^2 + gamma*(x - 1)/(y - 1)^2 + delta*x*(x - 1)/(y - x)^2)",
            "-(1/x + 1/(x - 1) + 1/(y - x))",
            "1/2*(1/y + 1/(y - 1) + 1/(y - x))",
            "0",
        ),
        "XXXII" => k("1/(2*y)", "0", "1/(2*y)", "0"),
        "Dini" => dini_equation(&Expr::var("x"), &Expr::var("y")),
        "Flat" => OdeCoeffs::zero(),
        _ => unreachable!(),
    })
}

/// The equation with every parameter bound.
pub fn get_equation(name: &str, params: &BTreeMap<String, Rational>) -> Result<OdeCoeffs> {
    let names = parameter_names(name)?;
    if let Some(extra) = params.keys().find(|k| !names.contains(&k.as_str())) {
        return Err(CoreError::Invalid(format!("{name} has no parameter `{extra}`")));
    }
    if let Some(missing) = names.iter().find(|n| !params.contains_key(**n)) {
        return Err(CoreError::MissingParameter(missing.to_string()));
    }
    Ok(symbolic_equation(name)?.bind(params))
}

/// `y'' = -(Y' + X' p + Y' p² + X' p³) / (2(X - Y))` for `X = X(x)`, `Y = Y(y)`.
pub fn dini_equation(big_x: &Expr, big_y: &Expr) -> OdeCoeffs {
    let den = 2 * (big_x - big_y);
    let dx = -liouville_expr::diff(big_x, "x");
    let dy = -liouville_expr::diff(big_y, "y");
    OdeCoeffs::new(
        dy.quotient(&den),
        dx.quotient(&den),
        dy.quotient(&den),
        dx.quotient(&den),
    )
}

/// The pair of solutions behind the metrics `(X - Y)(dx² + dy²)` and
/// `(1/Y - 1/X)(dx²/X + dy²/Y)`.
pub fn dini_pair(big_x: &Expr, big_y: &Expr) -> (PsiTriple, PsiTriple) {
    let w = (big_x - big_y).pow(rat(-1, 3));
    (
        PsiTriple::new(w.clone(), Expr::zero(), w.clone()),
        PsiTriple::new(&w * big_y, Expr::zero(), &w * big_x),
    )
}

/// The solution with `ψ2 = ψ3 = 0`, up to a constant.
pub fn get_degenerate_psi(name: &str) -> Result<Expr> {
    Ok(match known(name)? {
        "PI" | "PII" => e("1"),
        "PIII" => e("y^(4/3)/x^(2/3)"),
        "PIV" => e("y^(2/3)"),
        "PV" => e("(1 - y)^(4/3)*y^(2/3)/x^(2/3)"),
        "PVI" => e("(x - y)^(2/3)*((y - 1)*y/((x - 1)*x))^(2/3)"),
        "XXXII" => e("y^(2/3)"),
        "Flat" => e("1"),
        other => return Err(CoreError::NotAvailable(other.to_string(), "degenerate solution")),
    })
}

/// The metrisable families with a closed-form metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricCase {
    /// PIII with `β = δ = 0`.
    PainleveIII,
    /// PIII with `α = γ = 0`, obtained from the first case through `y -> 1/y`.
    PainleveIIIDual,
    /// PV with `γ = δ = 0`.
    PainleveV,
    XXXII,
    /// First Dini metric with `X = x`, `Y = y`.
    DiniFirst,
    /// Second Dini metric with `X = x`, `Y = y`.
    DiniSecond,
    Flat,
}

impl fmt::Display for MetricCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricCase::PainleveIII => "PIII(alpha, 0, gamma, 0)",
            MetricCase::PainleveIIIDual => "PIII(0, beta, 0, delta)",
            MetricCase::PainleveV => "PV(alpha, beta, 0, 0)",
            MetricCase::XXXII => "XXXII",
            MetricCase::DiniFirst => "Dini g1",
            MetricCase::DiniSecond => "Dini g2",
            MetricCase::Flat => "Flat",
        })
    }
}

fn piii_metric(a: &Expr, b: &Expr) -> Metric2D {
    let subst_ab = |t: &str| e(t).subst("A", a).subst("B", b);
    let omega = subst_ab("1/(A*(A - B + 2*A*alpha*x*y + A*gamma*x^2*y^2)^2)");
    Metric2D::new(
        &omega * subst_ab("(B - A*x*y*(2*alpha + gamma*x*y))/(A*x^2)"),
        &omega * e("1/(x*y)"),
        &omega * e("1/y^2"),
    )
}

fn piii_psi(a: &Expr, b: &Expr) -> PsiTriple {
    let subst_ab = |t: &str| e(t).subst("A", a).subst("B", b);
    PsiTriple::new(
        subst_ab("x^(-2/3)*y^(4/3)*(B - A*(2*alpha*x*y + gamma*x^2*y^2))"),
        subst_ab("A*x^(1/3)*y^(1/3)"),
        subst_ab("A*x^(4/3)*y^(-2/3)"),
    )
}

/// Rename `(alpha, gamma)` to `(-beta, -delta)`.
fn to_dual_parameters(t: &Expr) -> Expr {
    t.subst("alpha", &-e("beta")).subst("gamma", &-e("delta"))
}

impl MetricCase {
    pub const ALL: [MetricCase; 7] = [
        MetricCase::PainleveIII,
        MetricCase::PainleveIIIDual,
        MetricCase::PainleveV,
        MetricCase::XXXII,
        MetricCase::DiniFirst,
        MetricCase::DiniSecond,
        MetricCase::Flat,
    ];

    pub fn entry(&self) -> &'static str {
        match self {
            MetricCase::PainleveIII | MetricCase::PainleveIIIDual => "PIII",
            MetricCase::PainleveV => "PV",
            MetricCase::XXXII => "XXXII",
            MetricCase::DiniFirst | MetricCase::DiniSecond => "Dini",
            MetricCase::Flat => "Flat",
        }
    }

    /// Parameters fixed to zero by the case.
    pub fn constrained(&self) -> &'static [&'static str] {
        match self {
            MetricCase::PainleveIII => &["beta", "delta"],
            MetricCase::PainleveIIIDual => &["alpha", "gamma"],
            MetricCase::PainleveV => &["gamma", "delta"],
            _ => &[],
        }
    }

    /// Parameters left free by the case.
    pub fn free_parameters(&self) -> Vec<&'static str> {
        let all = parameter_names(self.entry()).expect("catalog entry");
        all.iter()
            .copied()
            .filter(|p| !self.constrained().contains(p))
            .collect()
    }

    /// Which case covers `name` at the given (possibly partial) parameter values.
    pub fn for_entry(name: &str, params: &BTreeMap<String, Rational>) -> Result<MetricCase> {
        let vanish = |names: &[&str]| {
            names
                .iter()
                .all(|n| params.get(*n).is_none_or(num_traits::Zero::is_zero))
        };
        match known(name)? {
            "PIII" if vanish(&["beta", "delta"]) => Ok(MetricCase::PainleveIII),
            "PIII" if vanish(&["alpha", "gamma"]) => Ok(MetricCase::PainleveIIIDual),
            "PV" if vanish(&["gamma", "delta"]) => Ok(MetricCase::PainleveV),
            "XXXII" => Ok(MetricCase::XXXII),
            "Dini" => Ok(MetricCase::DiniFirst),
            "Flat" => Ok(MetricCase::Flat),
            other => Err(CoreError::NotAvailable(
                other.to_string(),
                "metric for these parameters",
            )),
        }
    }

    /// The equation with the constrained parameters set to zero.
    pub fn equation(&self) -> OdeCoeffs {
        let zeros: BTreeMap<String, Rational> = self.constrained().iter().map(|n| (n.to_string(), rat(0, 1))).collect();
        symbolic_equation(self.entry()).expect("catalog entry").bind(&zeros)
    }

    /// The metric as printed, with free constants `A`, `B` where the family has them.
    pub fn metric(&self, constants: &(Rational, Rational)) -> Metric2D {
        self.metric_with(
            &Expr::constant(constants.0.clone()),
            &Expr::constant(constants.1.clone()),
        )
    }

    /// [`MetricCase::metric`] with arbitrary expressions for `A` and `B`.
    pub fn metric_with(&self, a: &Expr, b: &Expr) -> Metric2D {
        let (a, b) = (a.clone(), b.clone());
        match self {
            MetricCase::PainleveIII => piii_metric(&a, &b),
            MetricCase::PainleveIIIDual => piii_metric(&a, &b).map(to_dual_parameters).pullback(&e("x"), &e("1/y")),
            MetricCase::PainleveV => {
                let d = e("B*y + 2*A*(beta - alpha*y^2)").subst("A", &a).subst("B", &b);
                Metric2D::new(
                    e("y").quotient(&(a.powi(2) * e("x^2") * &d)),
                    Expr::zero(),
                    e("y").quotient(&(&a * e("(y - 1)^2") * d.powi(2))),
                )
            }
            MetricCase::XXXII => Metric2D::new(e("y"), Expr::zero(), e("y")),
            MetricCase::DiniFirst => Metric2D::new(e("x - y"), Expr::zero(), e("x - y")),
            MetricCase::DiniSecond => Metric2D::new(e("(1/y - 1/x)/x"), Expr::zero(), e("(1/y - 1/x)/y")),
            MetricCase::Flat => Metric2D::euclidean(),
        }
    }

    /// A solution of the Liouville system whose metric is [`MetricCase::metric`].
    pub fn psi(&self, constants: &(Rational, Rational)) -> PsiTriple {
        let a = Expr::constant(constants.0.clone());
        let b = Expr::constant(constants.1.clone());
        match self {
            MetricCase::PainleveIII => piii_psi(&a, &b),
            MetricCase::PainleveIIIDual => {
                let s = piii_psi(&a, &b);
                let s = PsiTriple::new(
                    to_dual_parameters(s.psi1()),
                    to_dual_parameters(s.psi2()),
                    to_dual_parameters(s.psi3()),
                );
                transform_psi(&s, &e("x"), &e("1/y"))
            }
            MetricCase::PainleveV => {
                let w = e("B*y + 2*A*(beta - alpha*y^2)").subst("A", &a).subst("B", &b);
                PsiTriple::new(
                    e("x^(-2/3)*((y - 1)^2)^(2/3)*y^(-1/3)") * w,
                    Expr::zero(),
                    &a * e("x^(4/3)*((y - 1)^2)^(-1/3)*y^(-1/3)"),
                )
            }
            MetricCase::XXXII => PsiTriple::new(e("y^(-1/3)"), Expr::zero(), e("y^(-1/3)")),
            MetricCase::DiniFirst => dini_pair(&e("x"), &e("y")).0,
            MetricCase::DiniSecond => dini_pair(&e("x"), &e("y")).1,
            MetricCase::Flat => PsiTriple::new(e("1"), e("0"), e("1")),
        }
    }

    pub fn killing_vector(&self) -> Option<VectorField> {
        match self {
            MetricCase::PainleveIII => Some(VectorField::new(e("x"), e("-y"))),
            MetricCase::PainleveIIIDual => Some(VectorField::new(e("x"), e("y"))),
            MetricCase::PainleveV => Some(VectorField::new(e("x"), e("0"))),
            MetricCase::XXXII | MetricCase::Flat => Some(VectorField::new(e("1"), e("0"))),
            MetricCase::DiniFirst | MetricCase::DiniSecond => None,
        }
    }

    /// The degenerate solution used to rebuild the Killing vector.
    pub fn degenerate_psi(&self) -> Option<PsiTriple> {
        match self {
            MetricCase::PainleveIII | MetricCase::PainleveV | MetricCase::XXXII => {
                Some(PsiTriple::degenerate(get_degenerate_psi(self.entry()).expect("listed")))
            }
            MetricCase::PainleveIIIDual => {
                let s = PsiTriple::degenerate(get_degenerate_psi("PIII").expect("listed"));
                Some(transform_psi(&s, &e("x"), &e("1/y")))
            }
            MetricCase::Flat => Some(PsiTriple::degenerate(e("1"))),
            MetricCase::DiniFirst | MetricCase::DiniSecond => None,
        }
    }

    /// First integrals printed for the case.
    pub fn integrals(&self) -> Vec<(&'static str, FirstIntegral)> {
        let r = |t: &str| FirstIntegral::rational(e(t));
        match self {
            MetricCase::PainleveIII => vec![("I", r("x^2*(p/y)^2 + 2*x*p/y - 2*alpha*x*y - gamma*x^2*y^2"))],
            MetricCase::PainleveIIIDual => {
                vec![("I", r("x^2*(p/y)^2 - 2*x*p/y + 2*beta*x/y + delta*x^2/y^2"))]
            }
            MetricCase::PainleveV => vec![("I", r("1/y*(x*p/(y - 1))^2 + 2*beta/y - 2*alpha*y"))],
            MetricCase::XXXII => vec![("I1", r("(1 + p^2)/y")), ("I2", r("2*p - x/y*(1 + p^2)"))],
            MetricCase::DiniFirst | MetricCase::DiniSecond => {
                vec![("ratio", r("(y + x*p^2)/(1 + p^2)"))]
            }
            MetricCase::Flat => vec![
                ("energy", r("1 + p^2")),
                ("slope", FirstIntegral::new(e("p"), IntegralKind::LinearInP)),
            ],
        }
    }
}

/// Further solutions of the Liouville system for XXXII besides the metric one.
pub fn xxxii_extra_solutions() -> Vec<PsiTriple> {
    vec![
        PsiTriple::degenerate(e("y^(2/3)")),
        PsiTriple::new(e("-x*y^(-1/3)"), e("y^(2/3)"), e("-x*y^(-1/3)")),
    ]
}

/// Coordinates `(X, Y)` in which the equation becomes `Y'' = 0`, as printed.
pub fn printed_flat_chart(name: &str) -> Result<(Expr, Expr)> {
    match known(name)? {
        "PIII" => Ok((e("log(x)"), e("exp(y)"))),
        "PV" => Ok((e("log(x)"), e("log((1 + sqrt(y))/sqrt(1 - y))"))),
        other => Err(CoreError::NotAvailable(other.to_string(), "printed flat chart")),
    }
}

/// Coordinates `(X, Y)` that linearize the all-zero-parameter equation.
///
/// For PIII the printed `Y = exp(y)` does not linearize the equation; `Y = log(y)` does.
pub fn flat_chart(name: &str) -> Result<(Expr, Expr)> {
    match known(name)? {
        "PIII" => Ok((e("log(x)"), e("log(y)"))),
        "PV" => printed_flat_chart("PV"),
        "Flat" => Ok((e("x"), e("y"))),
        other => Err(CoreError::NotAvailable(other.to_string(), "symbolic flat chart")),
    }
}

/// What the classification predicts for an entry at given parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expectation {
    pub verdict: Verdict,
    /// Degree of mobility when the classification fixes it.
    pub m: Option<usize>,
}

pub fn expected_results(name: &str, params: &BTreeMap<String, Rational>) -> Result<Expectation> {
    let zero = |n: &str| params.get(n).is_none_or(num_traits::Zero::is_zero);
    let all_zero = PAINLEVE_PARAMETERS.iter().all(|n| zero(n));
    let flat = Expectation {
        verdict: Verdict::FlatMetrisable,
        m: Some(6),
    };
    let two = Expectation {
        verdict: Verdict::Metrisable,
        m: Some(2),
    };
    let never = Expectation {
        verdict: Verdict::NotMetrisable,
        m: Some(1),
    };
    Ok(match known(name)? {
        "PI" | "PII" | "PIV" => never,
        "PIII" if all_zero => flat,
        "PIII" if (zero("alpha") && zero("gamma")) || (zero("beta") && zero("delta")) => two,
        "PV" if all_zero => flat,
        "PV" if zero("gamma") && zero("delta") => two,
        "PIII" | "PV" => never,
        "PVI" => {
            if zero("alpha") && zero("beta") && zero("gamma") && params.get("delta") == Some(&rat(1, 2)) {
                flat
            } else {
                never
            }
        }
        "XXXII" => Expectation {
            verdict: Verdict::Metrisable,
            m: Some(4),
        },
        "Dini" => Expectation {
            verdict: Verdict::Metrisable,
            m: None,
        },
        "Flat" => flat,
        _ => unreachable!(),
    })
}

/// Outcome of one self-check item.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckItem {
    pub subject: String,
    pub check: String,
    pub passed: bool,
    pub tier: String,
}

impl fmt::Display for CheckItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "pass" } else { "FAIL" };
        write!(f, "{mark}  {:<26} {} [{}]", self.subject, self.check, self.tier)
    }
}

fn item(subject: impl Into<String>, check: impl Into<String>, verdicts: &[liouville_expr::ZeroVerdict]) -> CheckItem {
    let passed = verdicts.iter().all(|v| v.is_zero);
    let probabilistic = verdicts
        .iter()
        .any(|v| v.tier == liouville_expr::ZeroTier::Probabilistic);
    CheckItem {
        subject: subject.into(),
        check: check.into(),
        passed,
        tier: if probabilistic { "probabilistic" } else { "exact" }.into(),
    }
}

/// Residual checks of everything stored for one metric case.
pub fn verify_case(case: MetricCase, constants: &(Rational, Rational), cfg: &ZeroTestConfig) -> Result<Vec<CheckItem>> {
    let subject = case.to_string();
    let k = case.equation();
    let s = case.psi(constants);
    let g = case.metric(constants);
    let mut out = Vec::new();

    let r = crate::metrisability::check_solution(&k, &s, cfg)?;
    out.push(item(&subject, "psi solves the Liouville system", &r));

    let from_psi = psi_to_metric(&s, cfg)?;
    let diffs = [
        is_zero_with(&(&from_psi.e - &g.e), cfg)?,
        is_zero_with(&(&from_psi.f - &g.f), cfg)?,
        is_zero_with(&(&from_psi.g - &g.g), cfg)?,
    ];
    out.push(item(&subject, "metric = psi / delta^2", &diffs));

    let lc = connection_to_coeffs(&levi_civita(&g, cfg)?);
    out.push(item(&subject, "geodesics of the metric", &lc.compare(&k, cfg)?));

    if let Some(kv) = case.killing_vector() {
        out.push(item(&subject, "Killing vector", &check_killing(&g, &kv, cfg)?));
        if let Some(deg) = case.degenerate_psi() {
            out.push(item(
                &subject,
                "degenerate solution",
                &crate::metrisability::check_solution(&k, &deg, cfg)?,
            ));
            let rebuilt = killing_from_degenerate(&s, &deg, cfg)?;
            let cross = &rebuilt.k1 * &kv.k2 - &rebuilt.k2 * &kv.k1;
            out.push(item(
                &subject,
                "Killing vector from degenerate solution",
                &[is_zero_with(&cross, cfg)?],
            ));
        }
    }
    for (label, integral) in case.integrals() {
        out.push(item(
            &subject,
            format!("integral {label} conserved"),
            &[is_conserved(&k, &integral, cfg)?],
        ));
    }
    if matches!(case, MetricCase::DiniFirst) {
        let (s1, s2) = dini_pair(&e("x"), &e("y"));
        let i = ratio_integral(&s2, &s1, cfg)?;
        let stored = &case.integrals()[0].1;
        out.push(item(
            &subject,
            "ratio of the Dini pair",
            &[is_zero_with(&(&i.value - &stored.value), cfg)?],
        ));
    }
    if matches!(case, MetricCase::XXXII) {
        for (n, extra) in xxxii_extra_solutions().iter().enumerate() {
            let r = crate::metrisability::check_solution(&k, extra, cfg)?;
            out.push(item(&subject, format!("further solution {}", n + 1), &r));
        }
        let i = ratio_integral(&s, &xxxii_extra_solutions()[0], cfg)?;
        let stored = &case.integrals()[0].1;
        let ratio = i.value.quotient(&stored.value);
        out.push(item(
            &subject,
            "I1 from a solution ratio",
            &[is_zero_with(&(ratio - Expr::one()), cfg)?],
        ));
    }
    Ok(out)
}

/// Degenerate solutions of the six Painlevé equations and XXXII, with symbolic parameters.
pub fn verify_degenerate_list(cfg: &ZeroTestConfig) -> Result<Vec<CheckItem>> {
    let mut out = Vec::new();
    for name in ["PI", "PII", "PIII", "PIV", "PV", "PVI", "XXXII"] {
        let k = symbolic_equation(name)?;
        let (a, b) = verify_degenerate_psi(&k, &get_degenerate_psi(name)?, cfg)?;
        out.push(item(name, "degenerate psi1", &[a, b]));
    }
    Ok(out)
}

/// The full build-time self-check.
pub fn self_check(cfg: &ZeroTestConfig) -> Result<Vec<CheckItem>> {
    let mut out = verify_degenerate_list(cfg)?;
    for case in MetricCase::ALL {
        out.extend(verify_case(case, &default_constants(), cfg)?);
    }
    Ok(out)
}

/// Catalog handle; constructing it runs [`self_check`].
#[derive(Debug, Clone)]
pub struct Catalog {
    pub checks: Vec<CheckItem>,
}

impl Catalog {
    pub fn load(cfg: &ZeroTestConfig) -> Result<Catalog> {
        let checks = self_check(cfg)?;
        if let Some(bad) = checks.iter().find(|c| !c.passed) {
            return Err(CoreError::SelfCheck(bad.to_string()));
        }
        Ok(Catalog { checks })
    }

    pub fn names(&self) -> &'static [&'static str] {
        &ENTRY_NAMES
    }

    pub fn equation(&self, name: &str, params: &BTreeMap<String, Rational>) -> Result<OdeCoeffs> {
        get_equation(name, params)
    }

    /// Metric and solution for `name` at the given parameters and constants.
    pub fn metric(
        &self,
        name: &str,
        params: &BTreeMap<String, Rational>,
        constants: &(Rational, Rational),
    ) -> Result<(Metric2D, PsiTriple)> {
        get_metric(name, params, constants)
    }
}

/// Metric and solution; parameters not given stay symbolic.
pub fn get_metric(
    name: &str,
    params: &BTreeMap<String, Rational>,
    constants: &(Rational, Rational),
) -> Result<(Metric2D, PsiTriple)> {
    let case = MetricCase::for_entry(name, params)?;
    let g = case.metric(constants).map(|c| c.bind(params));
    let s = case.psi(constants);
    let s = PsiTriple::new(s.psi1().bind(params), s.psi2().bind(params), s.psi3().bind(params));
    Ok((g, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ZeroTestConfig {
        ZeroTestConfig::default()
    }

    #[test]
    fn painleve_one_coefficients() {
        let k = get_equation("PI", &BTreeMap::new()).unwrap();
        assert_eq!(k.a0.to_string(), "6*y^2 + x");
        assert!(k.a1.is_const_zero() && k.a2.is_const_zero() && k.a3.is_const_zero());
    }

    #[test]
    fn missing_and_unknown() {
        assert_eq!(
            get_equation("PII", &BTreeMap::new()),
            Err(CoreError::MissingParameter("alpha".into()))
        );
        assert_eq!(symbolic_equation("PVII"), Err(CoreError::UnknownEntry("PVII".into())));
        assert!(get_metric("PI", &BTreeMap::new(), &default_constants()).is_err());
    }

    #[test]
    fn every_case_passes_its_checks() {
        for case in MetricCase::ALL {
            for item in verify_case(case, &default_constants(), &cfg()).unwrap() {
                assert!(item.passed, "{item}");
            }
        }
    }

    #[test]
    fn degenerate_list_passes() {
        for item in verify_degenerate_list(&cfg()).unwrap() {
            assert!(item.passed, "{item}");
        }
    }

    #[test]
    fn case_selection_follows_parameters() {
        let p = |pairs: &[(&str, i64)]| pairs.iter().map(|(k, v)| (k.to_string(), rat(*v, 1))).collect();
        assert_eq!(
            MetricCase::for_entry("PIII", &p(&[("alpha", 1), ("gamma", 2)])).unwrap(),
            MetricCase::PainleveIII
        );
        assert_eq!(
            MetricCase::for_entry("PIII", &p(&[("beta", 1), ("delta", 2)])).unwrap(),
            MetricCase::PainleveIIIDual
        );
        assert!(MetricCase::for_entry("PV", &p(&[("gamma", 1)])).is_err());
    }
}
