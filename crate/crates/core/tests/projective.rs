use std::collections::BTreeMap;

use liouville_core::catalog::{get_degenerate_psi, get_equation, symbolic_equation, MetricCase};
use liouville_core::metrisability::{
    degenerate_condition, is_solution, killing_tensor_residual, liouville_residuals, metric_to_psi, psi_to_metric,
    verify_degenerate_psi, PsiTriple,
};
use liouville_core::{
    connection_to_coeffs, is_projectively_flat, levi_civita, liouville_invariants, projective_shift,
    representative_connection, Connection, Metric2D, OdeCoeffs, OneForm,
};
use liouville_expr::{diff, is_zero, is_zero_with, rat, Expr, Rational, ZeroTestConfig, ZeroTier};
use proptest::prelude::*;

fn painleve(a: i64, b: i64, c: i64, d: (i64, i64)) -> BTreeMap<String, Rational> {
    [
        ("alpha", rat(a, 1)),
        ("beta", rat(b, 1)),
        ("gamma", rat(c, 1)),
        ("delta", rat(d.0, d.1)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn exact_zero(e: &Expr) -> bool {
    let v = is_zero(e).unwrap();
    assert_eq!(v.tier, ZeroTier::Exact, "{e}");
    v.is_zero
}

/// Polynomials of degree at most 2 in x, y with small integer coefficients.
fn poly() -> impl Strategy<Value = Expr> {
    prop::collection::vec(-3i64..=3, 6).prop_map(|c| {
        let x = Expr::var("x");
        let y = Expr::var("y");
        let monos = [Expr::one(), x.clone(), y.clone(), x.powi(2), &x * &y, y.powi(2)];
        Expr::sum(monos.into_iter().zip(c).map(|(m, c)| Expr::int(c) * m))
    })
}

/// Positive polynomials: 1 + sum of squares-like terms with nonnegative weights.
fn positive_poly() -> impl Strategy<Value = Expr> {
    (0i64..=2, 0i64..=2, 0i64..=2).prop_map(|(a, b, c)| {
        Expr::one()
            + Expr::int(a) * Expr::var("x").powi(2)
            + Expr::int(b) * Expr::var("y").powi(2)
            + Expr::int(c) * Expr::var("x") * Expr::var("y").powi(2)
    })
}

fn connection() -> impl Strategy<Value = Connection> {
    prop::collection::vec(poly(), 6).prop_map(|g| {
        Connection::new(
            g[0].clone(),
            g[1].clone(),
            g[2].clone(),
            g[3].clone(),
            g[4].clone(),
            g[5].clone(),
        )
    })
}

fn coeffs() -> impl Strategy<Value = OdeCoeffs> {
    prop::collection::vec(poly(), 4)
        .prop_map(|a| OdeCoeffs::new(a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone()))
}

/// Christoffel symbols of the second kind from `1/2 g^{ad}(d_b g_dc + d_c g_db - d_d g_bc)`.
fn christoffel_oracle(g: &Metric2D) -> [[[Expr; 2]; 2]; 2] {
    let v = ["x", "y"];
    let det = g.get(0, 0) * g.get(1, 1) - g.get(0, 1) * g.get(0, 1);
    let inv = [
        [g.get(1, 1).quotient(&det), (-g.get(0, 1)).quotient(&det)],
        [(-g.get(0, 1)).quotient(&det), g.get(0, 0).quotient(&det)],
    ];
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                let terms = (0..2).map(|d| {
                    &inv[a][d] * (diff(g.get(d, c), v[b]) + diff(g.get(d, b), v[c]) - diff(g.get(b, c), v[d]))
                });
                Expr::sum(terms) * Expr::ratio(1, 2)
            })
        })
    })
}

/// The equation of unparametrised geodesics read off from the oracle Christoffel symbols.
fn geodesic_equation_oracle(g: &Metric2D) -> OdeCoeffs {
    let c = christoffel_oracle(g);
    OdeCoeffs::new(
        -c[1][0][0].clone(),
        c[0][0][0].clone() - Expr::int(2) * &c[1][0][1],
        Expr::int(2) * &c[0][0][1] - &c[1][1][1],
        c[0][1][1].clone(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projective_change_keeps_the_equation(c in connection(), u1 in poly(), u2 in poly()) {
        let shifted = projective_shift(&c, &OneForm::new(u1, u2));
        let (a, b) = (connection_to_coeffs(&c), connection_to_coeffs(&shifted));
        for (p, q) in a.as_array().into_iter().zip(b.as_array()) {
            prop_assert!(exact_zero(&(p - q)));
        }
    }

    #[test]
    fn representative_connection_round_trip(k in coeffs()) {
        let back = connection_to_coeffs(&representative_connection(&k));
        for (p, q) in k.as_array().into_iter().zip(back.as_array()) {
            prop_assert!(exact_zero(&(p - q)));
        }
    }

    #[test]
    fn killing_tensor_matches_liouville_residuals(k in coeffs(), s in prop::collection::vec(poly(), 3)) {
        let s = PsiTriple::new(s[0].clone(), s[1].clone(), s[2].clone());
        let t = killing_tensor_residual(&representative_connection(&k), &s);
        let r = liouville_residuals(&k, &s);
        let three = Expr::int(3);
        prop_assert!(exact_zero(&(&r[0] - &t[0])));
        prop_assert!(exact_zero(&(&r[1] - &t[3])));
        prop_assert!(exact_zero(&(&r[2] - &three * &t[1])));
        prop_assert!(exact_zero(&(&r[3] - &three * &t[2])));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn metric_solves_the_liouville_system_of_its_geodesics(e in positive_poly(), f in poly(), g in positive_poly()) {
        // keep the form definite near the sample box by damping the cross term
        let f = f * Expr::ratio(1, 20);
        let metric = Metric2D::new(e, f, g);
        let cfg = ZeroTestConfig::default();
        let k = geodesic_equation_oracle(&metric);
        let lc = connection_to_coeffs(&levi_civita(&metric, &cfg).unwrap());
        prop_assert!(k.equals(&lc, &cfg).unwrap());
        let s = metric_to_psi(&metric, &cfg).unwrap();
        prop_assert!(is_solution(&k, &s, &cfg).unwrap());
        let back = psi_to_metric(&s, &cfg).unwrap();
        for (a, b) in [(0, 0), (0, 1), (1, 1)] {
            prop_assert!(is_zero_with(&(back.get(a, b) - metric.get(a, b)), &cfg).unwrap().is_zero);
        }
    }
}

#[test]
fn flatness_of_the_zero_parameter_equations() {
    let cfg = ZeroTestConfig::default();
    let zero = painleve(0, 0, 0, (0, 1));
    for name in ["PIII", "PV"] {
        let k = get_equation(name, &zero).unwrap();
        let (l1, l2) = liouville_invariants(&k);
        assert!(exact_zero(&l1) && exact_zero(&l2), "{name}");
        assert!(is_projectively_flat(&k, &cfg).unwrap().is_flat());
    }
    let k = get_equation("PVI", &painleve(0, 0, 0, (1, 2))).unwrap();
    let (l1, l2) = liouville_invariants(&k);
    for l in [l1, l2] {
        let v = is_zero_with(&l, &cfg).unwrap();
        assert!(v.is_zero, "{v}");
    }
    for (name, p) in [
        ("PI", BTreeMap::new()),
        ("PII", [("alpha".to_string(), rat(1, 1))].into()),
    ] {
        let k = get_equation(name, &p).unwrap();
        assert!(!is_projectively_flat(&k, &cfg).unwrap().is_flat(), "{name}");
    }
    // the flat model itself, and a parameter choice just off flatness
    assert!(is_projectively_flat(&OdeCoeffs::zero(), &cfg).unwrap().is_flat());
    let k = get_equation("PVI", &painleve(0, 0, 0, (1, 3))).unwrap();
    assert!(!is_projectively_flat(&k, &cfg).unwrap().is_flat());
}

#[test]
fn degenerate_solutions_of_all_six_equations() {
    let cfg = ZeroTestConfig::default();
    for name in ["PI", "PII", "PIII", "PIV", "PV", "PVI"] {
        let k = symbolic_equation(name).unwrap();
        // independent form of the obstruction: d_y A1 - 2 d_x A2
        let obstruction = diff(&k.a1, "y") - Expr::int(2) * diff(&k.a2, "x");
        assert!(exact_zero(&obstruction), "{name}");
        let v = degenerate_condition(&k, &cfg).unwrap();
        assert!(v.is_zero && v.tier == ZeroTier::Exact);
        let psi1 = get_degenerate_psi(name).unwrap();
        let (rx, ry) = verify_degenerate_psi(&k, &psi1, &cfg).unwrap();
        assert!(rx.is_zero && ry.is_zero, "{name}: {psi1}");
        // a degenerate triple with psi2 = psi3 = 0 solves the whole system
        assert!(is_solution(&k, &PsiTriple::degenerate(psi1), &cfg).unwrap(), "{name}");
    }
}

#[test]
fn catalog_metrics_reproduce_their_equations() {
    let cfg = ZeroTestConfig::default();
    let pairs = [(rat(1, 1), rat(2, 1)), (rat(3, 1), rat(-1, 2))];
    for case in [
        MetricCase::PainleveIII,
        MetricCase::PainleveV,
        MetricCase::PainleveIIIDual,
    ] {
        for constants in &pairs {
            let g = case.metric(constants);
            let k = case.equation();
            let lc = connection_to_coeffs(&levi_civita(&g, &cfg).unwrap());
            let verdicts = lc.compare(&k, &cfg).unwrap();
            assert!(verdicts.iter().all(|v| v.is_zero), "{case} {constants:?}");
            if case != MetricCase::PainleveIIIDual {
                assert!(verdicts.iter().all(|v| v.tier == ZeroTier::Exact), "{case}");
            }
            let oracle = geodesic_equation_oracle(&g);
            assert!(oracle.equals(&k, &cfg).unwrap(), "{case}");
        }
    }
    let g = Metric2D::new(Expr::var("y"), Expr::zero(), Expr::var("y"));
    let k = get_equation("XXXII", &BTreeMap::new()).unwrap();
    let v = connection_to_coeffs(&levi_civita(&g, &cfg).unwrap())
        .compare(&k, &cfg)
        .unwrap();
    assert!(v.iter().all(|v| v.is_zero && v.tier == ZeroTier::Exact));
    // a metric of a different equation does not match
    let other = get_equation("PI", &BTreeMap::new()).unwrap();
    assert!(!connection_to_coeffs(&levi_civita(&g, &cfg).unwrap())
        .equals(&other, &cfg)
        .unwrap());
}
