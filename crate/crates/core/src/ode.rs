//! Adaptive Dormand–Prince 5(4) integration with dense output.

use std::fmt;

/// Absolute and relative error tolerances per step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-10, rel: 1e-10 }
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// The solution left the monitored region near this abscissa.
    PoleDetected(f64),
    /// The step size collapsed without evidence of blow-up.
    StepFailure(f64),
}

impl Termination {
    pub fn is_completed(&self) -> bool {
        matches!(self, Termination::Completed)
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::Completed => f.write_str("completed"),
            Termination::PoleDetected(x) => write!(f, "pole detected near x = {x}"),
            Termination::StepFailure(x) => write!(f, "step size underflow at x = {x}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct StepOptions {
    pub tol: Tolerance,
    /// Smallest admissible step magnitude.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            tol: Tolerance::default(),
            h_min: 1e-12,
            max_steps: 200_000,
        }
    }
}

/// Quartic interpolant over one accepted step.
#[derive(Debug, Clone)]
struct Segment {
    x0: f64,
    h: f64,
    r: [Vec<f64>; 5],
}

impl Segment {
    fn eval(&self, x: f64) -> Vec<f64> {
        let t = (x - self.x0) / self.h;
        let t1 = 1.0 - t;
        (0..self.r[0].len())
            .map(|i| {
                let r = |k: usize| self.r[k][i];
                r(0) + t * (r(1) + t1 * (r(2) + t * (r(3) + t1 * r(4))))
            })
            .collect()
    }

    fn contains(&self, x: f64) -> bool {
        let (a, b) = (self.x0, self.x0 + self.h);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        x >= lo && x <= hi
    }
}

/// Accepted steps together with their dense output.
#[derive(Debug, Clone)]
pub struct Solution {
    pub xs: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub termination: Termination,
    segments: Vec<Segment>,
}

impl Solution {
    pub fn x_start(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_last(&self) -> f64 {
        *self.xs.last().expect("at least the initial point")
    }

    /// Interpolated state, or `None` outside the integrated range.
    pub fn eval(&self, x: f64) -> Option<Vec<f64>> {
        if x == self.xs[0] {
            return Some(self.states[0].clone());
        }
        // segments are ordered along the direction of integration
        let forward = self.x_last() >= self.x_start();
        let idx = self.segments.partition_point(|s| {
            let end = s.x0 + s.h;
            if forward {
                end < x
            } else {
                end > x
            }
        });
        self.segments.get(idx).filter(|s| s.contains(x)).map(|s| s.eval(x))
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [&[f64]; 7] = [
    &[],
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ],
    &[
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

fn finite(v: &[f64]) -> bool {
    v.iter().all(|c| c.is_finite())
}

/// Integrate `y' = f(x, y)` from `x0` to `x_end` (either direction).
///
/// `escaped` is consulted after every accepted step; returning true stops the run with
/// [`Termination::PoleDetected`]. On step collapse the same predicate, applied to the
/// state scaled by 1e-4, separates a pole from an ordinary failure.
pub fn dopri5<F, G>(mut f: F, x0: f64, y0: &[f64], x_end: f64, opts: &StepOptions, mut escaped: G) -> Solution
where
    F: FnMut(f64, &[f64]) -> Vec<f64>,
    G: FnMut(f64, &[f64]) -> bool,
{
    let n = y0.len();
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let span = (x_end - x0).abs();
    let mut sol = Solution {
        xs: vec![x0],
        states: vec![y0.to_vec()],
        termination: Termination::Completed,
        segments: Vec::new(),
    };
    if span == 0.0 {
        return sol;
    }
    let tol = opts.tol;
    let scale = |a: &[f64], b: &[f64], i: usize| tol.abs + tol.rel * a[i].abs().max(b[i].abs());

    let mut x = x0;
    let mut y = y0.to_vec();
    let mut k1 = f(x, &y);
    if !finite(&k1) {
        sol.termination = Termination::StepFailure(x);
        return sol;
    }
    // initial step from the size of the state and its derivative
    let d0 = (0..n).map(|i| (y[i] / scale(&y, &y, i)).powi(2)).sum::<f64>().sqrt();
    let d1 = (0..n).map(|i| (k1[i] / scale(&y, &y, i)).powi(2)).sum::<f64>().sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span).max(opts.h_min * 10.0) * dir;

    let mut k = vec![vec![0.0; n]; 7];
    let mut steps = 0;
    while (x_end - x) * dir > 0.0 {
        if steps >= opts.max_steps {
            sol.termination = Termination::StepFailure(x);
            return sol;
        }
        steps += 1;
        let last = (x + h - x_end) * dir >= 0.0;
        if last {
            h = x_end - x;
        }
        k[0].clone_from(&k1);
        let mut ok = true;
        let mut stage = vec![0.0; n];
        for s in 1..7 {
            for i in 0..n {
                stage[i] = y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(x + C[s] * h, &stage);
            if !finite(&k[s]) {
                ok = false;
                break;
            }
        }
        // stage 7 is evaluated at the new point, which is the fifth-order solution
        let y_new = stage;
        let err = if ok && finite(&y_new) {
            ((0..n)
                .map(|i| {
                    let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                    (e / scale(&y, &y_new, i)).powi(2)
                })
                .sum::<f64>()
                / n as f64)
                .sqrt()
        } else {
            f64::INFINITY
        };
        if err <= 1.0 {
            let r1: Vec<f64> = (0..n).map(|i| y_new[i] - y[i]).collect();
            let r2: Vec<f64> = (0..n).map(|i| h * k[0][i] - r1[i]).collect();
            let r3: Vec<f64> = (0..n).map(|i| r1[i] - h * k[6][i] - r2[i]).collect();
            let r4: Vec<f64> = (0..n)
                .map(|i| h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>())
                .collect();
            sol.segments.push(Segment {
                x0: x,
                h,
                r: [y.clone(), r1, r2, r3, r4],
            });
            x = if last { x_end } else { x + h };
            y = y_new;
            k1.clone_from(&k[6]);
            sol.xs.push(x);
            sol.states.push(y.clone());
            if escaped(x, &y) {
                sol.termination = Termination::PoleDetected(x);
                return sol;
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.25
            };
            h *= fac;
        }
        if h.abs() < opts.h_min {
            let shrunk: Vec<f64> = y.iter().map(|v| v * 1e4).collect();
            sol.termination = if escaped(x, &shrunk) {
                Termination::PoleDetected(x)
            } else {
                Termination::StepFailure(x)
            };
            return sol;
        }
    }
    sol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_dense_output() {
        let opts = StepOptions::default();
        let s = dopri5(|_, y| vec![y[0]], 0.0, &[1.0], 2.0, &opts, |_, _| false);
        assert!(s.termination.is_completed());
        assert!((s.x_last() - 2.0).abs() < 1e-15);
        assert!((s.states.last().unwrap()[0] - 2f64.exp()).abs() < 1e-8);
        for x in [0.1, 0.77, 1.5, 1.999] {
            let v = s.eval(x).unwrap()[0];
            assert!((v - f64::exp(x)).abs() < 1e-7 * x.exp(), "{x}: {v}");
        }
        assert!(s.eval(2.5).is_none());
    }

    #[test]
    fn backward_harmonic_oscillator() {
        let opts = StepOptions::default();
        let s = dopri5(|_, y| vec![y[1], -y[0]], 0.0, &[0.0, 1.0], -3.0, &opts, |_, _| false);
        let end = s.states.last().unwrap();
        assert!((end[0] - (-3f64).sin()).abs() < 1e-8);
        let mid = s.eval(-1.3).unwrap();
        assert!((mid[1] - (-1.3f64).cos()).abs() < 1e-7);
    }

    #[test]
    fn blow_up_is_a_pole() {
        // y' = y^2, y(0) = 1 has a pole at x = 1
        let opts = StepOptions::default();
        let s = dopri5(
            |_, y| vec![y[0] * y[0]],
            0.0,
            &[1.0],
            2.0,
            &opts,
            |_, y| y[0].abs() > 1e8,
        );
        match s.termination {
            Termination::PoleDetected(x) => assert!((x - 1.0).abs() < 1e-6, "{x}"),
            t => panic!("{t}"),
        }
    }
}
