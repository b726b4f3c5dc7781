//! Numerical first integral and flat chart of PVI at `(0, 0, 0, 1/2)`.
//!
//! Both are built from periods of the Legendre family `w(w - 1)(w - x)`: the
//! Picard–Fuchs equation `4x(x - 1) w'' + 4(2x - 1) w' + w = 0` and its adjoint
//! system `A' = B / (4x(x - 1))`, `B' = -B(1 - 2x)/(x(x - 1)) - A`.
//! Everything lives on the real chart `0 < y < 1 < x`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{CoreError, Result};
use crate::ode::{dopri5, Solution, StepOptions, Tolerance};

/// Gauss–Legendre degrees tried in turn until two successive values agree.
const QUADRATURE_DEGREES: [usize; 4] = [16, 32, 64, 128];
const QUADRATURE_TOL: f64 = 1e-13;

fn picard_fuchs_rhs(x: f64, s: &[f64]) -> Vec<f64> {
    let d = 4.0 * x * (x - 1.0);
    vec![s[1], -(4.0 * (2.0 * x - 1.0) * s[1] + s[0]) / d]
}

fn adjoint_rhs(x: f64, s: &[f64]) -> Vec<f64> {
    let (a, b) = (s[0], s[1]);
    let q = x * (x - 1.0);
    vec![b / (4.0 * q), -b * (1.0 - 2.0 * x) / q - a]
}

/// A solution integrated in both directions from an anchor.
#[derive(Debug, Clone)]
struct TwoSided {
    left: Solution,
    right: Solution,
}

impl TwoSided {
    fn solve(
        f: fn(f64, &[f64]) -> Vec<f64>,
        anchor: f64,
        init: [f64; 2],
        (a, b): (f64, f64),
        opts: &StepOptions,
    ) -> Result<Self> {
        let left = dopri5(f, anchor, &init, a, opts, |_, _| false);
        let right = dopri5(f, anchor, &init, b, opts, |_, _| false);
        for s in [&left, &right] {
            if !s.termination.is_completed() {
                return Err(CoreError::Invalid(format!(
                    "period integration stopped: {}",
                    s.termination
                )));
            }
        }
        Ok(TwoSided { left, right })
    }

    fn eval(&self, x: f64) -> Option<(f64, f64)> {
        let s = if x <= self.left.x_start() {
            &self.left
        } else {
            &self.right
        };
        s.eval(x).map(|v| (v[0], v[1]))
    }
}

/// Two solutions of the Picard–Fuchs equation and one of its adjoint system on an interval.
#[derive(Debug, Clone)]
pub struct PicardFuchsBasis {
    pub interval: (f64, f64),
    /// Point where the initial conditions are imposed.
    pub anchor: f64,
    /// `(A, B)` at the anchor.
    pub adjoint_init: (f64, f64),
    omega1: TwoSided,
    omega2: TwoSided,
    adjoint: TwoSided,
}

impl PicardFuchsBasis {
    fn check(&self, x: f64) -> Result<()> {
        let (a, b) = self.interval;
        if x < a || x > b {
            Err(CoreError::OutsideInterval(x))
        } else {
            Ok(())
        }
    }

    /// `(w1, w1')` with `w1 = 1`, `w1' = 0` at the anchor.
    pub fn omega1(&self, x: f64) -> Result<(f64, f64)> {
        self.check(x)?;
        self.omega1.eval(x).ok_or(CoreError::OutsideInterval(x))
    }

    /// `(w2, w2')` with `w2 = 0`, `w2' = 1` at the anchor.
    pub fn omega2(&self, x: f64) -> Result<(f64, f64)> {
        self.check(x)?;
        self.omega2.eval(x).ok_or(CoreError::OutsideInterval(x))
    }

    /// `(A, B)` solving the adjoint system.
    pub fn adjoint(&self, x: f64) -> Result<(f64, f64)> {
        self.check(x)?;
        self.adjoint.eval(x).ok_or(CoreError::OutsideInterval(x))
    }

    /// `w1 w2' - w1' w2`.
    pub fn wronskian(&self, x: f64) -> Result<f64> {
        let (a, da) = self.omega1(x)?;
        let (b, db) = self.omega2(x)?;
        Ok(a * db - da * b)
    }
}

/// Integrate the Picard–Fuchs equation and its adjoint over `interval`, which must avoid 0 and 1.
///
/// The anchor is `1/2` when it lies inside the interval, otherwise the midpoint.
pub fn picard_fuchs_solve(interval: (f64, f64), adjoint_init: (f64, f64), tol: Tolerance) -> Result<PicardFuchsBasis> {
    let (a, b) = interval;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(CoreError::Invalid(format!("bad interval [{a}, {b}]")));
    }
    if (a <= 0.0 && b >= 0.0) || (a <= 1.0 && b >= 1.0) {
        return Err(CoreError::SingularInterval(a, b));
    }
    if adjoint_init == (0.0, 0.0) {
        return Err(CoreError::Invalid("the adjoint initial value must be nonzero".into()));
    }
    let anchor = if a < 0.5 && 0.5 < b { 0.5 } else { 0.5 * (a + b) };
    let opts = StepOptions {
        tol,
        ..StepOptions::default()
    };
    Ok(PicardFuchsBasis {
        interval,
        anchor,
        adjoint_init,
        omega1: TwoSided::solve(picard_fuchs_rhs, anchor, [1.0, 0.0], interval, &opts)?,
        omega2: TwoSided::solve(picard_fuchs_rhs, anchor, [0.0, 1.0], interval, &opts)?,
        adjoint: TwoSided::solve(adjoint_rhs, anchor, [adjoint_init.0, adjoint_init.1], interval, &opts)?,
    })
}

/// Integrate `f` over `[0, upper]` with increasing Gauss–Legendre degree until two values agree.
fn converged_quadrature(upper: f64, f: impl Fn(f64) -> f64, x: f64, y: f64) -> Result<f64> {
    let mut prev: Option<f64> = None;
    for n in QUADRATURE_DEGREES {
        let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("positive degree"));
        let v = rule.integrate(0.0, upper, &f);
        if let Some(p) = prev {
            if (v - p).abs() <= QUADRATURE_TOL * v.abs().max(1.0) {
                return Ok(v);
            }
        }
        prev = Some(v);
    }
    Err(CoreError::Quadrature(x, y))
}

fn in_chart(x: f64, y: f64) -> Result<()> {
    if 0.0 < y && y < 1.0 && x > 1.0 {
        Ok(())
    } else {
        Err(CoreError::OutsideChart(x, y))
    }
}

/// `int_0^y dw / sqrt(w(w - 1)(w - x))`, computed with `w = sin^2 t`, which removes both
/// endpoint singularities.
pub fn incomplete_period(x: f64, y: f64) -> Result<f64> {
    in_chart(x, y)?;
    let upper = y.sqrt().asin();
    converged_quadrature(upper, |t| 2.0 / (x - t.sin().powi(2)).sqrt(), x, y)
}

/// The PVI first integral
/// `p B / sqrt(y(y - 1)(y - x)) + int_0^y (A + B / (2(w - x))) dw / sqrt(w(w - 1)(w - x))`,
/// with `(A, B)` the adjoint solution of `pf` at `x`.
pub fn pvi_integral_eval(pf: &PicardFuchsBasis, x: f64, y: f64, p: f64) -> Result<f64> {
    in_chart(x, y)?;
    let (a, b) = pf.adjoint(x)?;
    let upper = y.sqrt().asin();
    let integral = converged_quadrature(
        upper,
        |t| {
            let w = t.sin().powi(2);
            (a + b / (2.0 * (w - x))) * 2.0 / (x - w).sqrt()
        },
        x,
        y,
    )?;
    Ok(p * b / (y * (y - 1.0) * (y - x)).sqrt() + integral)
}

/// Coordinates `(w2 / w1, F / w1)` with `F` the incomplete period; PVI at `(0, 0, 0, 1/2)`
/// maps to straight lines in them.
pub fn pvi_flat_chart(pf: &PicardFuchsBasis, x: f64, y: f64) -> Result<(f64, f64)> {
    let (w1, _) = pf.omega1(x)?;
    let (w2, _) = pf.omega2(x)?;
    if w1 == 0.0 {
        return Err(CoreError::Chart(format!("w1 vanishes at x = {x}")));
    }
    Ok((w2 / w1, incomplete_period(x, y)? / w1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_through_a_singular_point_is_rejected() {
        let tol = Tolerance::default();
        assert!(matches!(
            picard_fuchs_solve((0.5, 1.5), (1.0, 1.0), tol),
            Err(CoreError::SingularInterval(..))
        ));
        assert!(matches!(
            picard_fuchs_solve((-1.0, 0.5), (1.0, 1.0), tol),
            Err(CoreError::SingularInterval(..))
        ));
    }

    #[test]
    fn anchor_choice() {
        let tol = Tolerance::default();
        assert_eq!(picard_fuchs_solve((0.1, 0.9), (1.0, 1.0), tol).unwrap().anchor, 0.5);
        assert_eq!(picard_fuchs_solve((2.0, 4.0), (1.0, 1.0), tol).unwrap().anchor, 3.0);
    }

    #[test]
    fn complete_period_at_the_edge_of_the_chart() {
        // y -> 1 gives the complete elliptic integral 2 K(1/x)
        let x = 2.0;
        let v = incomplete_period(x, 1.0 - 1e-15).unwrap();
        // 2 K(k) / sqrt(x) with k^2 = 1/2, K(1/sqrt 2) = 1.854074677301372
        let want = 2.0 * 1.854_074_677_301_372 / x.sqrt();
        assert!((v - want).abs() < 1e-6, "{v} vs {want}");
    }

    #[test]
    fn points_outside_the_chart() {
        assert!(matches!(incomplete_period(0.5, 0.2), Err(CoreError::OutsideChart(..))));
        assert!(matches!(incomplete_period(2.0, 1.2), Err(CoreError::OutsideChart(..))));
    }
}
