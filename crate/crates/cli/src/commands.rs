//! The subcommands, as functions from parsed arguments to reports.

use std::collections::BTreeMap;
use std::time::Instant;

use liouville_core::catalog::{
    default_constants, flat_chart, get_degenerate_psi, get_equation, parameter_names, symbolic_equation, verify_case,
    MetricCase, ENTRY_NAMES,
};
use liouville_core::dynamics::{
    coalescence_check, default_coalescence_points, flat_chart_check, flat_chart_check_with, integrate_geodesic,
    integrate_ode, monitor_integral, monitor_with, CoalescenceBranch, Drift, GeodesicState, Trajectory,
};
use liouville_core::integrals::FirstIntegral;
use liouville_core::metrisability::{metrisability_verdict, verify_degenerate_psi, Verdict};
use liouville_core::mobility::MobilityOptions;
use liouville_core::ode::{Termination, Tolerance};
use liouville_core::pvi::{picard_fuchs_solve, pvi_flat_chart, pvi_integral_eval};
use liouville_core::{CoreError, Metric2D, OdeCoeffs};
use liouville_expr::{rat, Rational, ZeroTestConfig};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::input::{render_input, InputError, OdeInput};
use crate::report::{Check, CoalescenceLine, DynamicsSummary, IntegralDrift, MetricSummary, Report, Status};

/// Relative drift allowed for the symbolic catalog integrals.
pub const DRIFT_TOL: f64 = 1e-8;
/// Relative drift allowed for the numerical PVI integral.
pub const PVI_DRIFT_TOL: f64 = 1e-6;
/// Largest relative `y` difference between ODE and geodesic solutions.
pub const GEODESIC_TOL: f64 = 1e-6;
/// Largest distance from a line in a flat chart.
pub const CHART_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(
                CoreError::Zero(_)
                | CoreError::SingularBase(..)
                | CoreError::NoBasePoint(_)
                | CoreError::Eval(_)
                | CoreError::Quadrature(..)
                | CoreError::SelfCheck(_),
            ) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Settings shared by the analysis commands.
#[derive(Debug, Clone)]
pub struct Settings {
    pub base: Option<(Rational, Rational)>,
    pub max_order: usize,
    pub tol: Tolerance,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            base: None,
            max_order: MobilityOptions::default().max_order,
            tol: Tolerance::default(),
            seed: liouville_expr::DEFAULT_SEED,
        }
    }
}

impl Settings {
    pub fn zero_test(&self) -> ZeroTestConfig {
        ZeroTestConfig {
            seed: self.seed,
            ..ZeroTestConfig::default()
        }
    }

    pub fn mobility(&self) -> MobilityOptions {
        MobilityOptions {
            max_order: self.max_order,
            ..MobilityOptions::default()
        }
    }
}

/// Catalog parameters with unspecified ones set to zero; unknown names are an error.
pub fn complete_parameters(name: &str, given: &BTreeMap<String, Rational>) -> Result<BTreeMap<String, Rational>> {
    let names = parameter_names(name)?;
    if let Some(extra) = given.keys().find(|k| !names.contains(&k.as_str())) {
        return Err(CliError::Usage(format!("{name} has no parameter `{extra}`")));
    }
    Ok(names
        .iter()
        .map(|n| (n.to_string(), given.get(*n).cloned().unwrap_or_else(Rational::zero)))
        .collect())
}

fn describe(name: &str, params: &BTreeMap<String, Rational>) -> String {
    if params.is_empty() {
        return name.to_string();
    }
    let list: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{name}({})", list.join(","))
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Constants tried in turn when a member of a metric family degenerates at the given parameters.
fn candidate_constants() -> [(Rational, Rational); 4] {
    [
        default_constants(),
        (rat(3, 1), rat(-1, 2)),
        (rat(1, 1), rat(1, 1)),
        (rat(2, 1), rat(-3, 1)),
    ]
}

/// A stored metric for `name` at `params`, bound to those values, with the constants that keep it nondegenerate.
fn bound_case(
    name: &str,
    params: &BTreeMap<String, Rational>,
    cfg: &ZeroTestConfig,
) -> Option<(MetricCase, Metric2D, (Rational, Rational))> {
    let case = MetricCase::for_entry(name, params).ok()?;
    candidate_constants().into_iter().find_map(|c| {
        let g = case.metric(&c).map(|e| e.bind(params));
        matches!(g.is_degenerate(cfg), Ok(false)).then_some((case, g, c))
    })
}

/// What `analyze` works on.
pub enum Source {
    Catalog {
        name: String,
        params: BTreeMap<String, Rational>,
    },
    File {
        path: String,
        input: OdeInput,
    },
}

pub fn analyze(source: &Source, settings: &Settings) -> Result<Report> {
    let start = Instant::now();
    let cfg = settings.zero_test();
    let (subject, k, params, catalog) = match source {
        Source::Catalog { name, params } => {
            let params = complete_parameters(name, params)?;
            (
                describe(name, &params),
                symbolic_equation(name)?,
                params,
                Some(name.as_str()),
            )
        }
        Source::File { path, input } => (path.clone(), input.coefficients.clone(), input.parameters.clone(), None),
    };
    let analysis = metrisability_verdict(&k, &params, settings.base.clone(), &settings.mobility(), &cfg)?;
    let mut report = Report::new("analyze", subject);
    report.set_analysis(&analysis);
    report.timings.insert("analysis".into(), ms(start));
    if analysis.verdict == Verdict::Inconclusive {
        report.status = Status::Inconclusive;
    }
    if let Some(name) = catalog {
        let metrisable = matches!(analysis.verdict, Verdict::Metrisable | Verdict::FlatMetrisable);
        match bound_case(name, &params, &cfg) {
            Some((case, g, (a, b))) if metrisable => {
                report.metric = Some(MetricSummary::new(format!("{case} with A = {a}, B = {b}"), &g));
            }
            _ if metrisable => report
                .notes
                .push(format!("no closed-form metric is stored for {name} here")),
            _ => {}
        }
    }
    Ok(report)
}

fn check(subject: &str, what: &str, verdicts: &[liouville_expr::ZeroVerdict]) -> Check {
    let passed = verdicts.iter().all(|v| v.is_zero);
    let tier = if verdicts.iter().all(|v| v.tier == liouville_expr::ZeroTier::Exact) {
        "exact"
    } else {
        "probabilistic"
    };
    Check {
        subject: subject.to_string(),
        check: what.to_string(),
        passed,
        tier: tier.to_string(),
    }
}

/// Residual checks of the stored metrics, solutions, Killing vectors and integrals of `name`.
pub fn verify(
    name: &str,
    params: Option<&BTreeMap<String, Rational>>,
    constants: &(Rational, Rational),
    settings: &Settings,
) -> Result<Report> {
    let start = Instant::now();
    let cfg = settings.zero_test();
    let known = ENTRY_NAMES
        .iter()
        .find(|n| **n == name)
        .ok_or_else(|| CoreError::UnknownEntry(name.to_string()))?;
    let cases: Vec<MetricCase> = match params {
        Some(p) => vec![MetricCase::for_entry(name, p)?],
        None => MetricCase::ALL.into_iter().filter(|c| c.entry() == *known).collect(),
    };
    let mut report = Report::new("verify", name);
    if let Ok(psi1) = get_degenerate_psi(name) {
        let (a, b) = verify_degenerate_psi(&symbolic_equation(name)?, &psi1, &cfg)?;
        report.checks.push(check(name, "degenerate psi1", &[a, b]));
    }
    for case in &cases {
        for item in verify_case(*case, constants, &cfg)? {
            report.checks.push((&item).into());
        }
    }
    if report.checks.is_empty() {
        report.notes.push(format!("nothing is stored for {name}"));
    }
    if report.checks.iter().any(|c| !c.passed) {
        report.status = Status::Failed;
    }
    report.timings.insert("verify".into(), ms(start));
    Ok(report)
}

/// Largest `|y_a - y_b| / max(1, |y_a|)` over the samples of `a` that `b` covers.
fn relative_deviation(a: &Trajectory, b: &Trajectory) -> f64 {
    a.samples
        .iter()
        .filter_map(|[x, y, _]| b.eval(*x).map(|(yb, _)| (y - yb).abs() / y.abs().max(1.0)))
        .fold(0.0, f64::max)
}

fn drift_entry(name: &str, expression: String, d: &Drift, tolerance: f64) -> IntegralDrift {
    IntegralDrift {
        name: name.to_string(),
        expression,
        initial: d.initial,
        max_abs: d.max_abs,
        relative: d.relative,
        tolerance,
        passed: d.relative < tolerance,
    }
}

/// Arguments of the `dynamics` command.
#[derive(Debug, Clone)]
pub struct DynamicsRequest {
    pub name: String,
    pub params: BTreeMap<String, Rational>,
    pub init: [f64; 3],
    pub x_end: f64,
}

pub fn dynamics(req: &DynamicsRequest, settings: &Settings) -> Result<Report> {
    let start = Instant::now();
    let cfg = settings.zero_test();
    let params = complete_parameters(&req.name, &req.params)?;
    let k: OdeCoeffs = get_equation(&req.name, &params)?;
    let t = integrate_ode(&k, req.init, req.x_end, settings.tol)?;
    let mut report = Report::new("dynamics", describe(&req.name, &params));
    report.timings.insert("integration".into(), ms(start));
    let mut summary = DynamicsSummary {
        init: req.init,
        x_end: req.x_end,
        termination: t.termination.to_string(),
        pole_at: match t.termination {
            Termination::PoleDetected(x) => Some(x),
            _ => None,
        },
        samples: t.samples.len(),
        last: t.last(),
        tol_abs: settings.tol.abs,
        tol_rel: settings.tol.rel,
        geodesic_deviation: None,
        flat_chart_residual: None,
    };
    if let Termination::StepFailure(x) = t.termination {
        report
            .notes
            .push(format!("integration stopped at x = {x} without evidence of a pole"));
    }
    let mut failed = false;

    if let Some((case, g, c)) = bound_case(&req.name, &params, &cfg) {
        for (label, i) in case.integrals() {
            let i = FirstIntegral::new(i.value.bind(&params), i.kind);
            match monitor_integral(&t, &i) {
                Ok(d) => {
                    let e = drift_entry(label, i.value.to_string(), &d, DRIFT_TOL);
                    failed |= !e.passed;
                    report.integrals.push(e);
                }
                Err(e) => report.notes.push(format!("integral {label} not monitored: {e}")),
            }
        }
        let state = GeodesicState {
            x: req.init[0],
            y: req.init[1],
            dx: 1.0,
            dy: req.init[2],
        };
        let geo_start = Instant::now();
        let mut geodesic = integrate_geodesic(&g, state, req.x_end, settings.tol, &cfg);
        let mut used = c;
        for other in candidate_constants() {
            if !matches!(geodesic, Err(CoreError::SingularInitialPoint)) {
                break;
            }
            let g = case.metric(&other).map(|e| e.bind(&params));
            if matches!(g.is_degenerate(&cfg), Ok(false)) {
                geodesic = integrate_geodesic(&g, state, req.x_end, settings.tol, &cfg);
                used = other;
            }
        }
        if geodesic.is_ok() && used != default_constants() {
            report
                .notes
                .push(format!("geodesics use the metric with A = {}, B = {}", used.0, used.1));
        }
        match geodesic {
            Ok(geo) => {
                let dev = relative_deviation(&t, &geo);
                failed |= dev >= GEODESIC_TOL;
                summary.geodesic_deviation = Some(dev);
            }
            Err(e) => report.notes.push(format!("geodesic not integrated: {e}")),
        }
        report.timings.insert("geodesic".into(), ms(geo_start));
    }

    let all_zero = params.values().all(Zero::is_zero);
    if all_zero {
        if let Ok((cx, cy)) = flat_chart(&req.name) {
            match flat_chart_check(&t, &cx, &cy) {
                Ok(fit) => {
                    failed |= fit.max_residual >= CHART_TOL;
                    summary.flat_chart_residual = Some(fit.max_residual);
                }
                Err(e) => report.notes.push(format!("flat chart not applicable: {e}")),
            }
        }
    }
    if req.name == "PVI" && params == complete_parameters("PVI", &[("delta".to_string(), rat(1, 2))].into())? {
        match pvi_checks(&t, settings.tol) {
            Ok((drift, residual)) => {
                let e = drift_entry(
                    "periods",
                    "numerical, from the Picard-Fuchs adjoint".into(),
                    &drift,
                    PVI_DRIFT_TOL,
                );
                failed |= !e.passed || residual >= CHART_TOL;
                report.integrals.push(e);
                summary.flat_chart_residual = Some(residual);
            }
            Err(e) => report.notes.push(format!("PVI period checks skipped: {e}")),
        }
    }
    report.dynamics = Some(summary);
    if failed {
        report.status = Status::Failed;
    }
    report.timings.insert("total".into(), ms(start));
    Ok(report)
}

/// Drift of the period integral and flat-chart residual along a PVI trajectory.
fn pvi_checks(t: &Trajectory, tol: Tolerance) -> std::result::Result<(Drift, f64), CoreError> {
    let (lo, hi) = t
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s[0]), hi.max(s[0]))
        });
    let margin = 0.05 * (hi - lo).max(1e-3);
    if lo <= 1.0 {
        return Err(CoreError::OutsideChart(lo, t.samples[0][1]));
    }
    let interval = ((lo - margin).max(0.5 * (1.0 + lo)), hi + margin);
    let fine = Tolerance {
        abs: tol.abs.min(1e-12),
        rel: tol.rel.min(1e-12),
    };
    let pf = picard_fuchs_solve(interval, (1.0, 1.0), fine)?;
    let drift = monitor_with(t, |x, y, p| pvi_integral_eval(&pf, x, y, p))?;
    let fit = flat_chart_check_with(t, |x, y| pvi_flat_chart(&pf, x, y))?;
    Ok((drift, fit.max_residual))
}

/// Arguments of the `coalesce` command.
#[derive(Debug, Clone)]
pub struct CoalesceRequest {
    pub alpha: Rational,
    pub gamma: Rational,
    pub epsilons: Vec<Rational>,
    /// Constants of the limit metric on the `gamma = 0` branch.
    pub constants: (Rational, Rational),
}

pub fn coalesce(req: &CoalesceRequest) -> Result<Report> {
    let start = Instant::now();
    if req.epsilons.is_empty() {
        return Err(CliError::Usage("at least one epsilon is needed".into()));
    }
    if req.epsilons.iter().any(Zero::is_zero) {
        return Err(CliError::Usage("epsilon must be nonzero".into()));
    }
    if req.epsilons.windows(2).any(|w| w[1].abs() >= w[0].abs()) {
        return Err(CliError::Usage("epsilons must shrink strictly in magnitude".into()));
    }
    let branch = if req.gamma.is_zero() {
        CoalescenceBranch::GammaZero {
            a: req.constants.0.clone(),
            b: req.constants.1.clone(),
        }
    } else {
        CoalescenceBranch::Generic
    };
    let rows = coalescence_check(
        &req.alpha,
        &req.gamma,
        &branch,
        &req.epsilons,
        &default_coalescence_points(),
    )?;
    let mut report = Report::new("coalesce", format!("alpha = {}, gamma = {}", req.alpha, req.gamma));
    if req.gamma.is_zero() {
        report.notes.push(format!(
            "gamma = 0 branch with limit constants A = {}, B = {}",
            req.constants.0, req.constants.1
        ));
    }
    report.coalescence = rows
        .iter()
        .map(|r| CoalescenceLine {
            epsilon: r.epsilon.to_string(),
            max_error: r.max_error,
            ratio: r.ratio,
        })
        .collect();
    if rows.windows(2).any(|w| w[1].max_error >= w[0].max_error) {
        report.status = Status::Failed;
    }
    report.timings.insert("coalescence".into(), ms(start));
    Ok(report)
}

/// One line of `catalog list`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub parameters: Vec<String>,
    pub metric_cases: Vec<String>,
}

pub fn catalog_list() -> Vec<CatalogEntry> {
    ENTRY_NAMES
        .iter()
        .map(|name| CatalogEntry {
            name: name.to_string(),
            parameters: parameter_names(name)
                .expect("catalog entry")
                .iter()
                .map(|s| s.to_string())
                .collect(),
            metric_cases: MetricCase::ALL
                .iter()
                .filter(|c| c.entry() == *name)
                .map(|c| c.to_string())
                .collect(),
        })
        .collect()
}

/// Stored data of one entry, as exported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogExport {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub coefficients: [String; 4],
    pub metric: Option<MetricSummary>,
    pub integrals: BTreeMap<String, String>,
}

/// The entry as an input file for `analyze`, and its stored data.
pub fn catalog_export(name: &str, params: &BTreeMap<String, Rational>) -> Result<(String, CatalogExport)> {
    let params = complete_parameters(name, params)?;
    let k = get_equation(name, &params)?;
    let file = render_input(&symbolic_equation(name)?, &params);
    let (metric, integrals) = match bound_case(name, &params, &ZeroTestConfig::default()) {
        Some((case, g, (a, b))) => (
            Some(MetricSummary::new(format!("{case} with A = {a}, B = {b}"), &g)),
            case.integrals()
                .into_iter()
                .map(|(l, i)| (l.to_string(), i.value.bind(&params).to_string()))
                .collect(),
        ),
        None => (None, BTreeMap::new()),
    };
    let export = CatalogExport {
        name: name.to_string(),
        parameters: params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
        coefficients: k.as_array().map(|e| e.to_string()),
        metric,
        integrals,
    };
    Ok((file, export))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_parameters_default_to_zero() {
        let p = complete_parameters("PVI", &[("delta".to_string(), rat(1, 2))].into()).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p["alpha"], rat(0, 1));
        assert!(complete_parameters("PII", &[("beta".to_string(), rat(1, 1))].into()).is_err());
    }

    #[test]
    fn increasing_epsilons_are_a_usage_error() {
        let req = CoalesceRequest {
            alpha: rat(1, 1),
            gamma: rat(1, 1),
            epsilons: vec![rat(1, 1000), rat(1, 100)],
            constants: default_constants(),
        };
        assert!(matches!(coalesce(&req), Err(CliError::Usage(_))));
    }
}
