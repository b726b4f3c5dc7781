//! Numerical trajectories of `y'' = A0 + A1 y' + A2 y'^2 + A3 y'^3` and of geodesics,
//! with drift monitors for first integrals and flat charts.

use std::collections::BTreeMap;

use liouville_expr::{rat, Compiled, Expr, FloatEvaluator, Rational, ZeroTestConfig};
use num_traits::{One, Zero};

use crate::catalog::MetricCase;
use crate::error::{CoreError, Result};
use crate::integrals::FirstIntegral;
use crate::ode::{dopri5, Solution, StepOptions, Termination, Tolerance};
use crate::projective::{levi_civita, Metric2D, OdeCoeffs};

/// `|y|` beyond this is treated as a movable pole.
pub const Y_MAX: f64 = 1e8;
/// `|y'|` beyond this is treated as a movable pole.
pub const P_MAX: f64 = 1e12;

#[derive(Debug, Clone, Copy)]
enum Layout {
    /// State `(y, p)`.
    Ode,
    /// State `(y, dx/dt, dy/dt)` of a geodesic parametrized by `x`.
    Geodesic,
}

/// A solution curve `x -> (y, y')` with dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Accepted steps as `(x, y, p)`.
    pub samples: Vec<[f64; 3]>,
    pub termination: Termination,
    pub tol: Tolerance,
    solution: Solution,
    layout: Layout,
}

impl Trajectory {
    fn new(solution: Solution, layout: Layout, tol: Tolerance) -> Self {
        let samples = solution
            .xs
            .iter()
            .zip(&solution.states)
            .map(|(x, s)| {
                let (y, p) = project(layout, s);
                [*x, y, p]
            })
            .collect();
        Trajectory {
            samples,
            termination: solution.termination,
            tol,
            solution,
            layout,
        }
    }

    /// `(y, y')` at `x`, or `None` outside the integrated range.
    pub fn eval(&self, x: f64) -> Option<(f64, f64)> {
        self.solution.eval(x).map(|s| project(self.layout, &s))
    }

    /// First and last abscissa reached.
    pub fn x_range(&self) -> (f64, f64) {
        (self.solution.x_start(), self.solution.x_last())
    }

    pub fn last(&self) -> [f64; 3] {
        *self.samples.last().expect("initial sample")
    }

    /// Whether `x` lies between the first and last abscissa.
    pub fn covers(&self, x: f64) -> bool {
        let (a, b) = self.x_range();
        x >= a.min(b) && x <= a.max(b)
    }
}

fn project(layout: Layout, s: &[f64]) -> (f64, f64) {
    match layout {
        Layout::Ode => (s[0], s[1]),
        Layout::Geodesic => (s[0], s[2] / s[1]),
    }
}

fn options(tol: Tolerance) -> StepOptions {
    StepOptions {
        tol,
        ..StepOptions::default()
    }
}

fn compile_xy(e: &Expr) -> Result<Compiled> {
    Ok(Compiled::new(e, &["x", "y"])?)
}

/// Integrate the equation `k` (all parameters bound) from `init = (x0, y0, p0)` to `x_end`.
pub fn integrate_ode(k: &OdeCoeffs, init: [f64; 3], x_end: f64, tol: Tolerance) -> Result<Trajectory> {
    if let Some(p) = k.parameters().into_iter().next() {
        return Err(CoreError::UnboundParameter(p));
    }
    let a: Vec<Compiled> = k.as_array().into_iter().map(compile_xy).collect::<Result<_>>()?;
    integrate_rhs(
        |x, y, p| {
            let args = [x, y];
            a[0].eval(&args) + p * (a[1].eval(&args) + p * (a[2].eval(&args) + p * a[3].eval(&args)))
        },
        init,
        x_end,
        tol,
    )
}

/// Integrate `y'' = rhs(x, y, y')` from `init = (x0, y0, p0)` to `x_end`.
pub fn integrate_rhs<F>(rhs: F, init: [f64; 3], x_end: f64, tol: Tolerance) -> Result<Trajectory>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let [x0, y0, p0] = init;
    if !rhs(x0, y0, p0).is_finite() {
        return Err(CoreError::SingularInitialPoint);
    }
    let sol = dopri5(
        |x, s| vec![s[1], rhs(x, s[0], s[1])],
        x0,
        &[y0, p0],
        x_end,
        &options(tol),
        |_, s| s[0].abs() > Y_MAX || s[1].abs() > P_MAX,
    );
    Ok(Trajectory::new(sol, Layout::Ode, tol))
}

/// Initial data of a geodesic: a point and a tangent vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
}

/// Integrate the geodesic of `g` through `init`, using `x` as the parameter, up to `x_end`.
pub fn integrate_geodesic(
    g: &Metric2D,
    init: GeodesicState,
    x_end: f64,
    tol: Tolerance,
    cfg: &ZeroTestConfig,
) -> Result<Trajectory> {
    let det = compile_xy(&g.determinant())?.eval(&[init.x, init.y]);
    if !det.is_finite() || det == 0.0 {
        return Err(CoreError::SingularInitialPoint);
    }
    if init.dx == 0.0 || !init.dx.is_finite() || !init.dy.is_finite() {
        return Err(CoreError::Chart("the tangent must have a nonzero x-component".into()));
    }
    let c = levi_civita(g, cfg)?;
    let gamma: Vec<Compiled> = (0..2)
        .flat_map(|a| [(0, 0), (0, 1), (1, 1)].map(|(b, cc)| (a, b, cc)))
        .map(|(a, b, cc)| compile_xy(c.get(a, b, cc)))
        .collect::<Result<_>>()?;
    let accel = |x: f64, s: &[f64], a: usize| {
        let args = [x, s[0]];
        let (u, v) = (s[1], s[2]);
        let g = &gamma[3 * a..3 * a + 3];
        -(g[0].eval(&args) * u * u + 2.0 * g[1].eval(&args) * u * v + g[2].eval(&args) * v * v)
    };
    let rhs = |x: f64, s: &[f64]| vec![s[2] / s[1], accel(x, s, 0) / s[1], accel(x, s, 1) / s[1]];
    if !rhs(init.x, &[init.y, init.dx, init.dy]).iter().all(|v| v.is_finite()) {
        return Err(CoreError::SingularInitialPoint);
    }
    let sol = dopri5(
        rhs,
        init.x,
        &[init.y, init.dx, init.dy],
        x_end,
        &options(tol),
        |_, s| s[0].abs() > Y_MAX || (s[2] / s[1]).abs() > P_MAX,
    );
    Ok(Trajectory::new(sol, Layout::Geodesic, tol))
}

/// Largest `|y_a - y_b|` and `|p_a - p_b|` over the samples of `a` that `b` covers.
pub fn max_deviation(a: &Trajectory, b: &Trajectory) -> (f64, f64) {
    a.samples
        .iter()
        .filter_map(|[x, y, p]| b.eval(*x).map(|(yb, pb)| ((y - yb).abs(), (p - pb).abs())))
        .fold((0.0, 0.0), |(dy, dp), (ey, ep)| (dy.max(ey), dp.max(ep)))
}

/// How far a conserved quantity wanders along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    pub initial: f64,
    /// `max |I - I(x0)|` over the samples.
    pub max_abs: f64,
    /// `max_abs / max(1, |I(x0)|)`.
    pub relative: f64,
    pub samples: usize,
}

/// Evaluate `i` on every sample of `t`.
pub fn monitor_integral(t: &Trajectory, i: &FirstIntegral) -> Result<Drift> {
    if let Some(p) = i
        .value
        .free_symbols()
        .into_iter()
        .find(|s| !["x", "y", "p"].contains(&s.as_str()))
    {
        return Err(CoreError::UnboundParameter(p));
    }
    let f = Compiled::new(&i.value, &["x", "y", "p"])?;
    monitor_with(t, |x, y, p| Ok(f.eval(&[x, y, p])))
}

/// Evaluate a numerical integral `f(x, y, p)` on every sample of `t`.
pub fn monitor_with<F>(t: &Trajectory, mut f: F) -> Result<Drift>
where
    F: FnMut(f64, f64, f64) -> Result<f64>,
{
    let mut values = Vec::with_capacity(t.samples.len());
    for &[x, y, p] in &t.samples {
        let v = f(x, y, p)?;
        if !v.is_finite() {
            return Err(CoreError::Chart(format!("integral is singular at x = {x}, y = {y}")));
        }
        values.push(v);
    }
    let initial = values[0];
    let max_abs = values.iter().map(|v| (v - initial).abs()).fold(0.0, f64::max);
    Ok(Drift {
        initial,
        max_abs,
        relative: max_abs / initial.abs().max(1.0),
        samples: values.len(),
    })
}

/// Least-squares line through a trajectory mapped into a chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|Y - slope * X - intercept|`.
    pub max_residual: f64,
    /// `max_residual / max(1, max |Y|)`.
    pub relative: f64,
}

/// Map `t` through the chart `(X(x, y), Y(x, y))` and fit `Y = a X + b`.
pub fn flat_chart_check(t: &Trajectory, big_x: &Expr, big_y: &Expr) -> Result<LineFit> {
    let fx = compile_xy(big_x)?;
    let fy = compile_xy(big_y)?;
    flat_chart_check_with(t, |x, y| Ok((fx.eval(&[x, y]), fy.eval(&[x, y]))))
}

/// [`flat_chart_check`] with a numerical chart.
pub fn flat_chart_check_with<F>(t: &Trajectory, mut chart: F) -> Result<LineFit>
where
    F: FnMut(f64, f64) -> Result<(f64, f64)>,
{
    let mut pts = Vec::with_capacity(t.samples.len());
    for &[x, y, _] in &t.samples {
        let (cx, cy) = chart(x, y)?;
        if !cx.is_finite() || !cy.is_finite() {
            return Err(CoreError::OutsideChart(x, y));
        }
        pts.push((cx, cy));
    }
    if pts.len() < 3 {
        return Err(CoreError::Invalid("too few samples for a line fit".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(CoreError::Invalid(
            "chart abscissa is constant along the trajectory".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = pts
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).abs())
        .fold(0.0, f64::max);
    let scale = pts.iter().map(|p| p.1.abs()).fold(1.0, f64::max);
    Ok(LineFit {
        slope,
        intercept,
        max_residual,
        relative: max_residual / scale,
    })
}

/// Which family of constants is used in the limit from PV to PIII.
#[derive(Debug, Clone, PartialEq)]
pub enum CoalescenceBranch {
    /// `gamma != 0`; the limit metric has `A = 1`, `B = 1 - 4 alpha^2 / gamma`.
    Generic,
    /// `gamma = 0`; the limit metric keeps the given constants `(A, B)`.
    GammaZero { a: Rational, b: Rational },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoalescenceRow {
    pub epsilon: Rational,
    /// Largest componentwise difference, relative to the largest limit component, over the points.
    pub max_error: f64,
    /// Error of the previous row divided by this one.
    pub ratio: Option<f64>,
}

fn constant(r: Rational) -> Expr {
    Expr::constant(r)
}

/// Pull the PV metric back under `X = x^2`, `Y = 1 + eps x y` and compare it with the PIII
/// metric at `(alpha, gamma)` for each `eps`, in 256-bit arithmetic.
pub fn coalescence_check(
    alpha: &Rational,
    gamma: &Rational,
    branch: &CoalescenceBranch,
    epsilons: &[Rational],
    points: &[(Rational, Rational)],
) -> Result<Vec<CoalescenceRow>> {
    let (limit_a, limit_b) = match branch {
        CoalescenceBranch::Generic if gamma.is_zero() => {
            return Err(CoreError::Invalid("the generic branch needs gamma != 0".into()));
        }
        CoalescenceBranch::Generic => (Rational::one(), Rational::one() - rat(4, 1) * alpha * alpha / gamma),
        CoalescenceBranch::GammaZero { .. } if !gamma.is_zero() => {
            return Err(CoreError::Invalid("the gamma = 0 branch needs gamma = 0".into()));
        }
        CoalescenceBranch::GammaZero { a, b } => (a.clone(), b.clone()),
    };
    let params = |a: &Rational, b: &Rational, c: &Rational| -> BTreeMap<String, Rational> {
        [("alpha", a), ("beta", b), ("gamma", c), ("delta", &Rational::zero())]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    };
    let limit = MetricCase::PainleveIII
        .metric(&(limit_a.clone(), limit_b.clone()))
        .map(|c| c.bind(&params(alpha, &Rational::zero(), gamma)));
    let mut ev = FloatEvaluator::new(256);
    let mut rows: Vec<CoalescenceRow> = Vec::new();
    for eps in epsilons {
        if eps.is_zero() {
            return Err(CoreError::Invalid("epsilon must be nonzero".into()));
        }
        let (alpha_v, beta_v, a, b) = match branch {
            CoalescenceBranch::Generic => {
                let den = rat(2, 1) * alpha * eps + gamma;
                if den.is_zero() {
                    return Err(CoreError::VanishingDenominator);
                }
                let a = constant(rat(4, 1) * gamma / &den).pow(rat(2, 3));
                let b = constant((gamma - alpha * eps) / (eps * eps))
                    * constant((rat(4, 1) * alpha * eps + rat(2, 1) * gamma) / gamma).pow(rat(1, 3));
                let alpha_v = gamma / (rat(8, 1) * eps * eps) + alpha / (rat(4, 1) * eps);
                let beta_v = -gamma / (rat(8, 1) * eps * eps);
                (alpha_v, beta_v, a, b)
            }
            CoalescenceBranch::GammaZero { a: a3, b: b3 } => {
                let a = constant(a3.clone()) * constant(rat(4, 1)).pow(rat(2, 3));
                let b =
                    constant((rat(2, 1) * alpha * a3 + (b3 - a3) * eps) / eps) * constant(rat(2, 1)).pow(rat(-2, 3));
                (alpha / (rat(4, 1) * eps), Rational::zero(), a, b)
            }
        };
        let pv = MetricCase::PainleveV
            .metric_with(&a, &b)
            .map(|c| c.bind(&params(&alpha_v, &beta_v, &Rational::zero())));
        let big_y = Expr::one() + constant(eps.clone()) * Expr::var("x") * Expr::var("y");
        let pulled = pv.pullback(&Expr::var("x").powi(2), &big_y);
        let mut worst = 0.0f64;
        for (x, y) in points {
            let at: BTreeMap<String, Rational> = [("x".to_string(), x.clone()), ("y".to_string(), y.clone())].into();
            let mut diff = 0.0f64;
            let mut size = 0.0f64;
            for (i, j) in [(0, 0), (0, 1), (1, 1)] {
                let d = ev.eval(&(pulled.get(i, j) - limit.get(i, j)), &at)?;
                let l = ev.eval(limit.get(i, j), &at)?;
                diff = diff.max(ev.to_f64(&d).abs());
                size = size.max(ev.to_f64(&l).abs());
            }
            if size == 0.0 {
                return Err(CoreError::OutsideChart(x_f64(x), x_f64(y)));
            }
            worst = worst.max(diff / size);
        }
        let ratio = rows.last().map(|r| r.max_error / worst);
        rows.push(CoalescenceRow {
            epsilon: eps.clone(),
            max_error: worst,
            ratio,
        });
    }
    Ok(rows)
}

fn x_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Rational points away from the singular loci of both metrics.
pub fn default_coalescence_points() -> Vec<(Rational, Rational)> {
    [(1, 2, 1, 3), (1, 1, 1, 2), (3, 2, 1, 4), (2, 3, 1, 1), (5, 4, 3, 4)]
        .into_iter()
        .map(|(a, b, c, d)| (rat(a, b), rat(c, d)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get_equation;

    #[test]
    fn free_particle_is_a_straight_line() {
        let t = integrate_ode(&OdeCoeffs::zero(), [0.0, 1.0, 2.0], 3.0, Tolerance::default()).unwrap();
        assert!(t.termination.is_completed());
        let [x, y, p] = t.last();
        assert_eq!(x, 3.0);
        assert!((y - 7.0).abs() < 1e-9 && (p - 2.0).abs() < 1e-9);
        let (y, _) = t.eval(1.5).unwrap();
        assert!((y - 4.0).abs() < 1e-9);
    }

    #[test]
    fn unbound_parameters_are_rejected() {
        let k = crate::catalog::symbolic_equation("PII").unwrap();
        assert!(matches!(
            integrate_ode(&k, [0.0, 1.0, 0.0], 1.0, Tolerance::default()),
            Err(CoreError::UnboundParameter(_))
        ));
    }

    #[test]
    fn painleve_one_reaches_a_pole() {
        let k = get_equation("PI", &BTreeMap::new()).unwrap();
        let t = integrate_ode(&k, [0.0, 1.0, 0.0], 10.0, Tolerance::default()).unwrap();
        assert!(
            matches!(t.termination, Termination::PoleDetected(x) if x < 10.0),
            "{}",
            t.termination
        );
    }

    #[test]
    fn euclidean_geodesic() {
        let cfg = ZeroTestConfig::default();
        let init = GeodesicState {
            x: 0.0,
            y: 0.0,
            dx: 2.0,
            dy: 1.0,
        };
        let t = integrate_geodesic(&Metric2D::euclidean(), init, 4.0, Tolerance::default(), &cfg).unwrap();
        let [_, y, p] = t.last();
        assert!((y - 2.0).abs() < 1e-10 && (p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn line_fit_of_a_line() {
        let t = integrate_ode(&OdeCoeffs::zero(), [1.0, 0.0, -1.0], 2.0, Tolerance::default()).unwrap();
        let fit = flat_chart_check(&t, &Expr::var("x"), &Expr::var("y")).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-9 && fit.max_residual < 1e-9);
    }
}
