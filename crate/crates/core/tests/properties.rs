//! Randomised invariants: jets against finite differences, the expression
//! printer against the parser, and the pointwise identities between a
//! connection, its dual and the metric.

use std::sync::Arc;

use proptest::prelude::*;
use tmk::bundle::classify::evaluate_sample;
use tmk::geometry::identity_residuals;
use tmk::zoo;
use tmk::{parse_expr, ConnectionField, Expr, ScalarJet, TangentPoint};

const DIM: usize = 3;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0..DIM).prop_map(Expr::coord),
        (-2.0..2.0f64).prop_map(Expr::num),
    ]
}

/// Smooth everywhere: no logs, roots or fractional powers, and division
/// only by something bounded away from zero.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / (2.0 + b.clone() * b)),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            inner.clone().prop_map(|a| a.sin().exp()),
            inner.clone().prop_map(|a| -a),
            inner.prop_map(|a| a.pow(2, 1)),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, DIM)
}

fn jet(e: &Expr, x: &[f64], order: u8) -> ScalarJet {
    e.eval_jet(x, order).expect("smooth expression evaluates")
}

fn shifted(x: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += h;
    y
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-5 * (1.0 + scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jet_derivatives_match_central_differences(e in smooth_expr(), x in point()) {
        let h = 1e-5;
        let j = jet(&e, &x, 3);
        for i in 0..DIM {
            let (p, m) = (jet(&e, &shifted(&x, i, h), 3), jet(&e, &shifted(&x, i, -h), 3));
            let scale = p.value().abs().max(m.value().abs()) / h;
            prop_assert!(close(j.d1(i), (p.value() - m.value()) / (2.0 * h), scale * 1e-6), "d1 {i}");
            for k in 0..DIM {
                let fd = (p.d1(k) - m.d1(k)) / (2.0 * h);
                prop_assert!(close(j.d2(i, k), fd, p.d1(k).abs().max(m.d1(k).abs()) * 1e-1), "d2 {i}{k}");
                for l in 0..DIM {
                    let fd = (p.d2(k, l) - m.d2(k, l)) / (2.0 * h);
                    prop_assert!(close(j.d3(i, k, l), fd, p.d2(k, l).abs().max(m.d2(k, l).abs()) * 1e-1), "d3 {i}{k}{l}");
                }
            }
        }
    }

    #[test]
    fn mixed_partials_are_symmetric(e in smooth_expr(), x in point()) {
        let j = jet(&e, &x, 3);
        // permutations are accumulated separately, so allow rounding
        let same = |u: f64, v: f64| (u - v).abs() <= 1e-12 * (1.0 + u.abs());
        for a in 0..DIM {
            for b in 0..DIM {
                prop_assert!(same(j.d2(a, b), j.d2(b, a)));
                for c in 0..DIM {
                    prop_assert!(same(j.d3(a, b, c), j.d3(c, a, b)), "{} {}", j.d3(a, b, c), j.d3(c, a, b));
                    prop_assert!(same(j.d3(a, b, c), j.d3(b, a, c)));
                }
            }
        }
    }

    #[test]
    fn printed_expressions_parse_back(e in smooth_expr(), x in point()) {
        let printed = e.to_string();
        let back = parse_expr(&printed, DIM).unwrap();
        prop_assert_eq!(back.to_string(), printed.clone());
        let (a, b) = (e.eval_real(&x).unwrap(), back.eval_real(&x).unwrap());
        prop_assert!(a == b || (a.is_nan() && b.is_nan()), "{printed}: {a} vs {b}");
    }

    #[test]
    fn pythagoras_holds_to_third_order(e in smooth_expr(), x in point()) {
        let j = jet(&e, &x, 3);
        let one = &(&j.sin() * &j.sin()) + &(&j.cos() * &j.cos());
        prop_assert!((one.value() - 1.0).abs() < 1e-12);
        prop_assert!(one.grad().iter().all(|g| g.abs() < 1e-9 * (1.0 + j.grad().iter().map(|v| v * v).sum::<f64>())));
    }

    #[test]
    fn dual_identities_on_random_pairs(seed in any::<u64>(), n in 2usize..=4, t in prop::collection::vec(-0.9..0.9f64, 4)) {
        let model = zoo::random_model(seed, n);
        let x = &t[..n];
        let r = identity_residuals(&model.metric, &model.connection, x).unwrap();
        prop_assert!(r.dual_torsion <= 1e-9, "{r:?}");
        prop_assert!(r.dual_curvature <= 1e-9, "{r:?}");
        prop_assert!(r.involution <= 1e-9, "{r:?}");
        prop_assert!(r.levi_civita <= 1e-9, "{r:?}");
    }

    #[test]
    fn first_bianchi_for_torsion_free_connections(seed in any::<u64>(), n in 2usize..=4, t in prop::collection::vec(-0.9..0.9f64, 4)) {
        let model = zoo::random_model(seed, n);
        let lc = Arc::new(ConnectionField::LeviCivita(model.metric.clone()));
        let r = identity_residuals(&model.metric, &lc, &t[..n]).unwrap();
        let b = r.first_bianchi.expect("Levi-Civita has no torsion");
        prop_assert!(b <= 1e-9, "{b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lifted_formulas_match_the_chart_oracle(seed in any::<u64>(), n in 2usize..=3, t in prop::collection::vec(-0.9..0.9f64, 6)) {
        let model = zoo::random_model(seed, n);
        let p = TangentPoint::new(t[..n].to_vec(), t[3..3 + n].to_vec()).unwrap();
        let s = evaluate_sample(&model, &p).unwrap();
        for key in ["curvature_lifted_vs_oracle", "ricci_lifted_vs_oracle", "d_omega_lifted_vs_oracle", "nijenhuis_lifted_vs_oracle"] {
            prop_assert!(s.residuals[key] <= 1e-8, "{key} {}", s.residuals[key]);
        }
        prop_assert!(s.residuals["e_condition_left"] <= 1e-10);
        prop_assert!(s.residuals["e_condition_right"] <= 1e-10);
        prop_assert!(s.residuals["hermitian"] <= 1e-12);
        prop_assert!(s.residuals["complex_square"] <= 1e-12);
    }
}
