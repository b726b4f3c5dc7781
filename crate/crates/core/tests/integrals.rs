use std::collections::BTreeMap;

use liouville_core::catalog::{dini_pair, get_equation, xxxii_extra_solutions, MetricCase};
use liouville_core::integrals::{
    check_killing, integral_from_killing, is_conserved, killing_from_degenerate, ratio_integral, FirstIntegral,
    VectorField,
};
use liouville_core::metrisability::is_solution;
use liouville_core::{CoreError, OdeCoeffs};
use liouville_expr::{diff, is_zero_with, rat, Expr, ZeroTestConfig, ZeroTier};

fn constants() -> [(liouville_expr::Rational, liouville_expr::Rational); 2] {
    [(rat(1, 1), rat(2, 1)), (rat(2, 1), rat(-3, 1))]
}

/// `dI/dx` along solutions, written out from the chain rule.
fn total_derivative(k: &OdeCoeffs, i: &Expr) -> Expr {
    let p = Expr::var("p");
    let ypp = &k.a0 + &k.a1 * &p + &k.a2 * p.powi(2) + &k.a3 * p.powi(3);
    diff(i, "x") + &p * diff(i, "y") + ypp * diff(i, "p")
}

#[test]
fn printed_integrals_are_conserved_exactly() {
    let cfg = ZeroTestConfig::default();
    for case in MetricCase::ALL {
        let k = case.equation();
        for (label, i) in case.integrals() {
            let v = is_conserved(&k, &i, &cfg).unwrap();
            assert!(v.is_zero && v.tier == ZeroTier::Exact, "{case} {label}: {v}");
            let oracle = is_zero_with(&total_derivative(&k, &i.value), &cfg).unwrap();
            assert!(oracle.is_zero, "{case} {label}");
        }
    }
}

#[test]
fn non_integrals_are_rejected() {
    let cfg = ZeroTestConfig::default();
    let k = get_equation("PI", &BTreeMap::new()).unwrap();
    assert!(
        !is_conserved(&k, &FirstIntegral::rational(Expr::var("x")), &cfg)
            .unwrap()
            .is_zero
    );
    // the PIII integral with the sign of the linear term flipped
    let k = MetricCase::PainleveIII.equation();
    let wrong = liouville_expr::parse_expr(
        "x^2*(p/y)^2 - 2*x*p/y - 2*alpha*x*y - gamma*x^2*y^2",
        &liouville_expr::SymbolTable::with_parameters(["alpha", "gamma"]),
    )
    .unwrap();
    assert!(!is_conserved(&k, &FirstIntegral::rational(wrong), &cfg).unwrap().is_zero);
}

#[test]
fn killing_vectors_and_their_integrals() {
    let cfg = ZeroTestConfig::default();
    for case in MetricCase::ALL {
        let Some(kv) = case.killing_vector() else { continue };
        for c in constants() {
            let g = case.metric(&c);
            assert!(
                check_killing(&g, &kv, &cfg).unwrap().iter().all(|v| v.is_zero),
                "{case}"
            );
            let i = integral_from_killing(&g, &kv, &cfg).unwrap();
            assert!(is_conserved(&case.equation(), &i, &cfg).unwrap().is_zero, "{case}");
            if let Some(deg) = case.degenerate_psi() {
                let rebuilt = killing_from_degenerate(&case.psi(&c), &deg, &cfg).unwrap();
                assert!(rebuilt.is_parallel_to(&kv, &cfg).unwrap(), "{case}: {rebuilt}");
            }
        }
    }
}

#[test]
fn a_non_killing_vector_is_refused() {
    let cfg = ZeroTestConfig::default();
    let g = MetricCase::XXXII.metric(&constants()[0]);
    let v = VectorField::new(Expr::zero(), Expr::one());
    assert!(matches!(
        integral_from_killing(&g, &v, &cfg),
        Err(CoreError::NotKilling)
    ));
}

#[test]
fn ratio_integrals() {
    let cfg = ZeroTestConfig::default();
    let k = get_equation("XXXII", &BTreeMap::new()).unwrap();
    let base = MetricCase::XXXII.psi(&constants()[0]);
    for s in xxxii_extra_solutions() {
        assert!(is_solution(&k, &s, &cfg).unwrap());
        let i = ratio_integral(&s, &base, &cfg).unwrap();
        assert!(is_conserved(&k, &i, &cfg).unwrap().is_zero, "{i}");
    }
    let (s1, s2) = dini_pair(&Expr::var("x"), &Expr::var("y"));
    let k = get_equation("Dini", &BTreeMap::new()).unwrap();
    let i = ratio_integral(&s1, &s2, &cfg).unwrap();
    // the solutions carry fractional powers, so only the sampled tier applies here
    let v = is_conserved(&k, &i, &cfg).unwrap();
    assert!(v.is_zero, "{v}");
}
