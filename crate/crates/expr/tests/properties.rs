use std::collections::BTreeMap;

use liouville_expr::*;
use proptest::prelude::*;

fn symbols() -> SymbolTable {
    SymbolTable::with_parameters(["a"])
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        Just(Expr::var("a")),
        (-5i64..=5).prop_map(Expr::int),
        (1i64..=4, 2i64..=5).prop_map(|(n, d)| Expr::ratio(n, d)),
    ]
}

/// Rational functions in x, y, a.
fn rational_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::sum),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::product),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                // shift the denominator so it is never the literal zero
                let den = b + Expr::int(7);
                if den.is_const_zero() {
                    a
                } else {
                    a.quotient(&den)
                }
            }),
            (inner, -2i64..=3).prop_map(|(a, n)| if a.is_const_zero() && n < 0 { a } else { a.powi(n) }),
        ]
    })
}

/// Expressions that may contain fractional powers, exp and log.
fn general_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::sum),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::product),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                let den = b + Expr::int(3);
                if den.is_const_zero() {
                    a
                } else {
                    a.quotient(&den)
                }
            }),
            (inner.clone(), -3i64..=3, 1i64..=3).prop_map(|(a, n, d)| {
                let r = rat(n, d);
                if a.as_const().is_some() && num_traits::Zero::is_zero(a.as_const().unwrap()) {
                    a
                } else {
                    a.pow(r)
                }
            }),
            // exp and log only of leaves, so sampled magnitudes stay moderate
            (inner.clone(), leaf()).prop_map(|(a, l)| a * l.exp()),
            (inner, leaf()).prop_map(|(a, l)| a + l.log()),
        ]
    })
}

fn rational_point() -> impl Strategy<Value = BTreeMap<String, Rational>> {
    (1i64..60, 1i64..60, -40i64..40, 1i64..9, 1i64..9, 1i64..9).prop_map(|(x, y, a, dx, dy, da)| {
        [("x", rat(x, dx)), ("y", rat(y, dy)), ("a", rat(a, da))]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printer_output_parses_back_to_the_same_tree(e in general_expr()) {
        let text = e.to_string();
        let back = parse_expr(&text, &symbols()).unwrap();
        prop_assert_eq!(&back, &e, "printed as {}", text);
    }

    #[test]
    fn expansion_agrees_with_exact_evaluation(e in rational_expr(), pt in rational_point()) {
        let direct = eval_exact(&e, &pt);
        match expand_rational(&e) {
            Ok(form) => {
                let num = form.numerator.eval_exact(&pt).unwrap();
                let den = form.denominator().eval_exact(&pt).unwrap();
                if let Ok(v) = direct {
                    if !num_traits::Zero::is_zero(&den) {
                        prop_assert_eq!(v, num / den);
                    }
                }
            }
            Err(ExpandError::ZeroDenominator) => prop_assert!(direct.is_err()),
            Err(ExpandError::NotRational(s)) => prop_assert!(false, "rational input rejected: {}", s),
        }
    }

    #[test]
    fn leibniz_rule(f in rational_expr(), g in rational_expr()) {
        for v in ["x", "y"] {
            let lhs = diff(&(f.clone() * g.clone()), v);
            let rhs = diff(&f, v) * g.clone() + f.clone() * diff(&g, v);
            let verdict = is_zero(&(lhs - rhs));
            if let Ok(verdict) = verdict {
                prop_assert!(verdict.is_zero);
            }
        }
    }

    #[test]
    fn derivative_is_linear(f in general_expr(), g in general_expr(), c in -6i64..6) {
        let lhs = diff(&(f.clone() + Expr::int(c) * g.clone()), "x");
        let rhs = diff(&f, "x") + Expr::int(c) * diff(&g, "x");
        if let Ok(verdict) = is_zero(&(lhs - rhs)) {
            prop_assert!(verdict.is_zero);
        }
    }

    #[test]
    fn tiers_agree_on_rational_expressions(f in rational_expr(), g in rational_expr()) {
        for e in [f.clone() - f.clone() * Expr::one(), f.clone() * g.clone() - g.clone() * f.clone(), f.clone() - g.clone()] {
            // a denominator that expands to zero leaves nothing to compare
            let Ok(exact) = is_zero(&e) else { continue };
            if exact.tier != ZeroTier::Exact {
                continue;
            }
            if let Ok(prob) = is_zero_probabilistic(&e, &ZeroTestConfig::default()) {
                prop_assert_eq!(exact.is_zero, prob.is_zero, "{}", e);
            }
        }
    }

    #[test]
    fn series_of_product_is_product_of_series(f in rational_expr(), g in rational_expr()) {
        let f = f.subst("a", &Expr::int(2));
        let g = g.subst("a", &Expr::ratio(1, 3));
        let pt = (rat(5, 3), rat(7, 2));
        let order = 3;
        let sf = series_expand(&f, (&pt.0, &pt.1), order);
        let sg = series_expand(&g, (&pt.0, &pt.1), order);
        if let (Ok(sf), Ok(sg)) = (sf, sg) {
            let sfg = series_expand(&(f * g), (&pt.0, &pt.1), order).unwrap();
            prop_assert_eq!(sfg, sf.mul(&sg));
        }
    }
}

#[test]
fn series_expansion_matches_exact_value_at_the_base_point() {
    let e = parse_expr("(x^2 - y)/(1 + x*y) + 3/y^2", &symbols()).unwrap();
    let (x0, y0) = (rat(2, 3), rat(5, 4));
    let s = series_expand(&e, (&x0, &y0), 4).unwrap();
    let pt: BTreeMap<String, Rational> = [("x".to_string(), x0), ("y".to_string(), y0)].into_iter().collect();
    assert_eq!(s.coeff(0, 0), eval_exact(&e, &pt).unwrap());
    let dxy = diff_n(&e, &["x", "y"]);
    assert_eq!(s.coeff(1, 1), eval_exact(&dxy, &pt).unwrap());
    let dxx = diff_n(&e, &["x", "x"]);
    assert_eq!(s.coeff(2, 0) * rat(2, 1), eval_exact(&dxx, &pt).unwrap());
}

#[test]
fn probabilistic_tier_handles_fractional_powers_of_products() {
    let t = symbols();
    let psi = parse_expr("(x-y)^(2/3)*((y-1)*y/((x-1)*x))^(2/3)", &t).unwrap();
    let alt = parse_expr("((x-y)^2*(y-1)^2*y^2/((x-1)^2*x^2))^(1/3)", &t).unwrap();
    let v = is_zero(&(psi - alt)).unwrap();
    assert!(v.is_zero);
    assert_eq!(v.tier, ZeroTier::Probabilistic);
}
