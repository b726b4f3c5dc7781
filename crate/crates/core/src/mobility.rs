//! Degree of mobility by exact linear algebra on Taylor truncations of the Liouville system.
//!
//! At order `n` the unknowns are the Taylor coefficients of `ψ1, ψ2, ψ3` up to total degree
//! `n`, and the equations are the Taylor coefficients of the four residuals up to degree
//! `n - 1`. The equations of degree below `n - 1` only involve coefficients of degree below
//! `n`, so the order-`n` kernel is found from the order-`(n-1)` kernel plus the new top-degree
//! coefficients, subject to the degree-`(n-1)` equations alone.

use std::fmt;

use num_traits::Zero;

use liouville_expr::{monomial_count, monomial_index, series_expand, Expr, Rational, Series2, SeriesError};

use crate::error::{CoreError, Result};
use crate::linalg::{nullspace, primitive, rank};
use crate::projective::OdeCoeffs;

/// Orders below this always have dimensions 3, 5, 6 and are not reported.
pub const FIRST_REPORTED_ORDER: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobilityOptions {
    pub max_order: usize,
    /// Number of consecutive equal dimensions accepted as stable.
    pub window: usize,
    /// Extra base points tried before declaring that no nondegenerate solution exists.
    pub base_retries: usize,
}

impl Default for MobilityOptions {
    fn default() -> Self {
        MobilityOptions {
            max_order: 10,
            window: 3,
            base_retries: 3,
        }
    }
}

/// Taylor coefficients of `(ψ1, ψ2, ψ3)` at a base point, component-major in graded order.
#[derive(Debug, Clone, PartialEq)]
pub struct JetVector {
    pub base: (Rational, Rational),
    pub order: usize,
    pub coeffs: Vec<Rational>,
}

impl JetVector {
    /// Coefficient of `u^i v^j` in component `k` (0, 1, 2 for ψ1, ψ2, ψ3).
    pub fn coeff(&self, k: usize, i: usize, j: usize) -> &Rational {
        &self.coeffs[k * monomial_count(self.order) + monomial_index(i, j)]
    }

    pub fn component(&self, k: usize) -> Series2 {
        let n = monomial_count(self.order);
        Series2::from_coeffs(self.order, self.coeffs[k * n..(k + 1) * n].to_vec())
    }

    pub fn truncate(&self, order: usize) -> JetVector {
        let order = order.min(self.order);
        let n = monomial_count(self.order);
        let m = monomial_count(order);
        let coeffs = (0..3)
            .flat_map(|k| self.coeffs[k * n..k * n + m].iter().cloned())
            .collect();
        JetVector {
            base: self.base.clone(),
            order,
            coeffs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityReport {
    pub base: (Rational, Rational),
    /// Kernel dimension at orders `FIRST_REPORTED_ORDER, FIRST_REPORTED_ORDER + 1, ...`.
    pub dims: Vec<usize>,
    /// Stabilized dimension; `None` when the dimensions did not settle by the maximal order.
    pub m: Option<usize>,
    pub stop_order: usize,
    pub kernel: Vec<JetVector>,
    pub nondegenerate_exists: bool,
    /// Dimension of the kernel part with `ψ2 = ψ3 = 0`.
    pub degenerate_subspace_dim: usize,
}

impl fmt::Display for MobilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.m.map_or_else(|| "inconclusive".to_string(), |m| m.to_string());
        write!(
            f,
            "base ({}, {}), dims {:?} from order {}, m = {}",
            self.base.0, self.base.1, self.dims, FIRST_REPORTED_ORDER, m
        )
    }
}

/// Derivative terms of each residual: (component, direction, factor).
const DERIVATIVES: [&[(usize, usize, i64)]; 4] = [
    &[(0, 0, 1)],
    &[(2, 1, 1)],
    &[(0, 1, 1), (1, 0, 2)],
    &[(2, 0, 1), (1, 1, 2)],
];

/// Zero-order terms: residual r gets `Σ_k Σ_i c[r][k][i] A_i ψ_k`, entries are (num, den).
const MULTIPLIERS: [[[(i64, i64); 4]; 3]; 4] = [
    [
        [(0, 1), (-2, 3), (0, 1), (0, 1)],
        [(2, 1), (0, 1), (0, 1), (0, 1)],
        [(0, 1); 4],
    ],
    [
        [(0, 1); 4],
        [(0, 1), (0, 1), (0, 1), (-2, 1)],
        [(0, 1), (0, 1), (2, 3), (0, 1)],
    ],
    [
        [(0, 1), (0, 1), (-4, 3), (0, 1)],
        [(0, 1), (2, 3), (0, 1), (0, 1)],
        [(2, 1), (0, 1), (0, 1), (0, 1)],
    ],
    [
        [(0, 1), (0, 1), (0, 1), (-2, 1)],
        [(0, 1), (0, 1), (-2, 3), (0, 1)],
        [(0, 1), (4, 3), (0, 1), (0, 1)],
    ],
];

fn series_error(e: SeriesError, base: &(Rational, Rational)) -> CoreError {
    match e {
        SeriesError::Unbound(name) => CoreError::UnboundParameter(name),
        SeriesError::NotRational(s) => CoreError::NotRationalCoefficients(s),
        SeriesError::Pole => CoreError::SingularBase(format!("{}, {}", base.0, base.1), SeriesError::Pole),
    }
}

/// Taylor series of `A0..A3` at `base`.
pub fn coefficient_series(k: &OdeCoeffs, base: &(Rational, Rational), order: usize) -> Result<[Series2; 4]> {
    let mut out = Vec::with_capacity(4);
    for a in k.as_array() {
        out.push(series_expand(a, (&base.0, &base.1), order).map_err(|e| series_error(e, base))?);
    }
    Ok(out.try_into().expect("four series"))
}

/// Incremental kernel computation, one truncation order at a time.
#[derive(Debug, Clone)]
pub struct JetSolver {
    base: (Rational, Rational),
    max_order: usize,
    mult: Vec<Vec<Series2>>,
    order: usize,
    basis: Vec<[Vec<Rational>; 3]>,
}

impl JetSolver {
    pub fn new(k: &OdeCoeffs, base: (Rational, Rational), max_order: usize) -> Result<Self> {
        let a = coefficient_series(k, &base, max_order.max(1))?;
        let mult = MULTIPLIERS
            .iter()
            .map(|per_k| {
                per_k
                    .iter()
                    .map(|cs| {
                        let mut s = Series2::zero(a[0].order());
                        for (ai, &(n, d)) in a.iter().zip(cs.iter()) {
                            if n != 0 {
                                s = s.add(&ai.scale(&liouville_expr::rat(n, d)));
                            }
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let unit = |k: usize| {
            let mut v: [Vec<Rational>; 3] = Default::default();
            for (c, slot) in v.iter_mut().enumerate() {
                slot.push(if c == k {
                    Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                });
            }
            v
        };
        Ok(JetSolver {
            base,
            max_order,
            mult,
            order: 0,
            basis: (0..3).map(unit).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Sparse row of the degree-`(i, j)` coefficient of residual `r` at truncation order
    /// `i + j + 1`, as (component, monomial index, value).
    fn row(&self, r: usize, i: usize, j: usize) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for &(k, dir, factor) in DERIVATIVES[r] {
            let (idx, mult) = if dir == 0 {
                (monomial_index(i + 1, j), i + 1)
            } else {
                (monomial_index(i, j + 1), j + 1)
            };
            out.push((k, idx, Rational::from_integer((factor * mult as i64).into())));
        }
        for (k, m) in self.mult[r].iter().enumerate() {
            for a in 0..=i {
                for b in 0..=j {
                    let c = m.coeff_ref(a, b);
                    if !c.is_zero() {
                        out.push((k, monomial_index(i - a, j - b), c.clone()));
                    }
                }
            }
        }
        out
    }

    /// Advance to the next truncation order.
    pub fn step(&mut self) {
        assert!(
            self.order < self.max_order,
            "series were expanded only to order {}",
            self.max_order
        );
        let n = self.order + 1;
        let prev_count = monomial_count(n - 1);
        let nprev = self.basis.len();
        let ncols = nprev + 3 * (n + 1);
        let mut rows = Vec::with_capacity(4 * n);
        for r in 0..4 {
            for j in 0..n {
                let i = n - 1 - j;
                let mut dense = vec![Rational::zero(); ncols];
                for (k, idx, v) in self.row(r, i, j) {
                    if idx < prev_count {
                        for (l, b) in self.basis.iter().enumerate() {
                            let bv = &b[k][idx];
                            if !bv.is_zero() {
                                dense[l] += &v * bv;
                            }
                        }
                    } else {
                        dense[nprev + k * (n + 1) + (idx - prev_count)] += v;
                    }
                }
                rows.push(dense);
            }
        }
        let count = monomial_count(n);
        let mut next = Vec::new();
        for sol in nullspace(&rows, ncols) {
            let mut comps: [Vec<Rational>; 3] = Default::default();
            for (k, comp) in comps.iter_mut().enumerate() {
                let mut v = vec![Rational::zero(); count];
                for (l, b) in self.basis.iter().enumerate() {
                    if sol[l].is_zero() {
                        continue;
                    }
                    for (slot, bv) in v.iter_mut().zip(b[k].iter()) {
                        if !bv.is_zero() {
                            *slot += &sol[l] * bv;
                        }
                    }
                }
                for t in 0..=n {
                    v[prev_count + t] = sol[nprev + k * (n + 1) + t].clone();
                }
                *comp = v;
            }
            let flat: Vec<Rational> = comps.iter().flatten().cloned().collect();
            let flat = primitive(flat);
            let mut it = flat.into_iter();
            for comp in comps.iter_mut() {
                *comp = it.by_ref().take(count).collect();
            }
            next.push(comps);
        }
        self.basis = next;
        self.order = n;
    }

    pub fn kernel(&self) -> Vec<JetVector> {
        self.basis
            .iter()
            .map(|b| JetVector {
                base: self.base.clone(),
                order: self.order,
                coeffs: b.iter().flatten().cloned().collect(),
            })
            .collect()
    }

    /// Symmetric matrix of `Q(c) = (Σ c ψ1)(Σ c ψ3) - (Σ c ψ2)²` at the base point.
    pub fn base_quadratic_form(&self) -> Vec<Vec<Rational>> {
        let v: Vec<[&Rational; 3]> = self.basis.iter().map(|b| [&b[0][0], &b[1][0], &b[2][0]]).collect();
        let half = liouville_expr::rat(1, 2);
        v.iter()
            .map(|vi| {
                v.iter()
                    .map(|vj| (vi[0] * vj[2] + vj[0] * vi[2]) * &half - vi[1] * vj[1])
                    .collect()
            })
            .collect()
    }

    pub fn degenerate_subspace_dim(&self) -> usize {
        let count = monomial_count(self.order);
        let rows: Vec<Vec<Rational>> = (1..3)
            .flat_map(|k| (0..count).map(move |idx| (k, idx)))
            .map(|(k, idx)| self.basis.iter().map(|b| b[k][idx].clone()).collect())
            .collect();
        self.basis.len() - rank(&rows, self.basis.len())
    }
}

/// Positive integer points ordered by `x + y`, then `x`.
pub fn base_point_candidates() -> impl Iterator<Item = (Rational, Rational)> {
    (2i64..).flat_map(|s| (1..s).map(move |x| (liouville_expr::rat(x, 1), liouville_expr::rat(s - x, 1))))
}

const BASE_SEARCH_LIMIT: usize = 200;

fn is_regular(k: &OdeCoeffs, base: &(Rational, Rational)) -> Result<bool> {
    match coefficient_series(k, base, 0) {
        Ok(_) => Ok(true),
        Err(CoreError::SingularBase(..)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// First candidate point where every coefficient is regular.
pub fn default_base_point(k: &OdeCoeffs) -> Result<(Rational, Rational)> {
    for c in base_point_candidates().take(BASE_SEARCH_LIMIT) {
        if is_regular(k, &c)? {
            return Ok(c);
        }
    }
    Err(CoreError::NoBasePoint(BASE_SEARCH_LIMIT))
}

/// Raw kernel dimensions at orders `0..=max_order`.
pub fn kernel_dimensions(k: &OdeCoeffs, base: (Rational, Rational), max_order: usize) -> Result<Vec<usize>> {
    let mut solver = JetSolver::new(k, base, max_order)?;
    let mut dims = vec![solver.dim()];
    while solver.order() < max_order {
        solver.step();
        dims.push(solver.dim());
    }
    Ok(dims)
}

fn form_is_nonzero(q: &[Vec<Rational>]) -> bool {
    q.iter().flatten().any(|v| !v.is_zero())
}

pub fn mobility(k: &OdeCoeffs, base: (Rational, Rational), opts: &MobilityOptions) -> Result<MobilityReport> {
    let mut solver = JetSolver::new(k, base.clone(), opts.max_order)?;
    let mut dims = Vec::new();
    let mut m = None;
    while solver.order() < opts.max_order {
        solver.step();
        if solver.order() < FIRST_REPORTED_ORDER {
            continue;
        }
        dims.push(solver.dim());
        if dims.len() >= opts.window.max(1) {
            let tail = &dims[dims.len() - opts.window.max(1)..];
            // a plateau at 5 cannot be final
            if tail.iter().all(|&d| d == tail[0]) && tail[0] != 5 {
                m = Some(tail[0]);
                break;
            }
        }
    }
    let mut nondegenerate_exists = form_is_nonzero(&solver.base_quadratic_form());
    if !nondegenerate_exists && m.is_some_and(|m| m > 0) {
        let mut tried = 0;
        for alt in base_point_candidates().take(BASE_SEARCH_LIMIT) {
            if tried >= opts.base_retries {
                break;
            }
            if alt == base || !is_regular(k, &alt)? {
                continue;
            }
            tried += 1;
            let mut s = JetSolver::new(k, alt, solver.order())?;
            while s.order() < solver.order() {
                s.step();
            }
            if form_is_nonzero(&s.base_quadratic_form()) {
                nondegenerate_exists = true;
                break;
            }
        }
    }
    Ok(MobilityReport {
        base,
        dims,
        m,
        stop_order: solver.order(),
        kernel: solver.kernel(),
        nondegenerate_exists,
        degenerate_subspace_dim: solver.degenerate_subspace_dim(),
    })
}

/// Taylor coefficients of an explicit rational triple, laid out like the kernel vectors.
pub fn jet_of(psi: [&Expr; 3], base: &(Rational, Rational), order: usize) -> Result<JetVector> {
    let mut coeffs = Vec::new();
    for e in psi {
        let s = series_expand(e, (&base.0, &base.1), order).map_err(|err| series_error(err, base))?;
        coeffs.extend(s.coeffs().iter().cloned());
    }
    Ok(JetVector {
        base: base.clone(),
        order,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use liouville_expr::{parse_expr, rat, SymbolTable};

    fn k(a0: &str, a1: &str, a2: &str, a3: &str) -> OdeCoeffs {
        let t = SymbolTable::with_parameters(Vec::<String>::new());
        let p = |s: &str| parse_expr(s, &t).unwrap();
        OdeCoeffs::new(p(a0), p(a1), p(a2), p(a3))
    }

    #[test]
    fn low_orders_have_fixed_dimensions() {
        let dims = kernel_dimensions(&k("6*y^2 + x", "0", "0", "0"), (rat(0, 1), rat(1, 1)), 3).unwrap();
        assert_eq!(&dims[..3], &[3, 5, 6]);
    }

    #[test]
    fn flat_model_has_six() {
        let r = mobility(&OdeCoeffs::zero(), (rat(1, 1), rat(1, 1)), &MobilityOptions::default()).unwrap();
        assert_eq!(r.m, Some(6));
        assert!(r.nondegenerate_exists);
        assert_eq!(r.degenerate_subspace_dim, 1);
    }

    #[test]
    fn painleve_one_at_the_listed_base_point() {
        let r = mobility(
            &k("6*y^2 + x", "0", "0", "0"),
            (rat(0, 1), rat(1, 1)),
            &MobilityOptions::default(),
        )
        .unwrap();
        assert_eq!(r.m, Some(1));
        assert!(!r.nondegenerate_exists);
        assert_eq!(r.degenerate_subspace_dim, 1);
    }

    #[test]
    fn default_base_point_skips_poles() {
        let b = default_base_point(&k("1/(x - 1)", "1/y", "0", "1/(y - x)")).unwrap();
        assert_eq!(b, (rat(2, 1), rat(1, 1)));
    }

    #[test]
    fn truncation_keeps_components_aligned() {
        let j = jet_of(
            [&Expr::var("x"), &Expr::int(2), &Expr::var("y")],
            &(rat(1, 1), rat(3, 1)),
            2,
        )
        .unwrap();
        let t = j.truncate(1);
        assert_eq!(t.coeffs.len(), 9);
        assert_eq!(t.coeff(0, 1, 0), &rat(1, 1));
        assert_eq!(t.coeff(1, 0, 0), &rat(2, 1));
        assert_eq!(t.coeff(2, 0, 0), &rat(3, 1));
    }
}
