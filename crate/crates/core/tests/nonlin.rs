use proptest::prelude::*;
use sonine_core::nonlin::{check_source_conditions, convexity_check, osgood_tail, NonlinearSource};
use sonine_core::Error;

fn catalog() -> Vec<NonlinearSource> {
    vec![
        NonlinearSource::FisherKPP,
        NonlinearSource::power_fisher(2.0, 1.5).unwrap(),
        NonlinearSource::power_fisher(1.3, 3.0).unwrap(),
        NonlinearSource::Logarithmic,
        NonlinearSource::ExpExp,
        NonlinearSource::ExpShift,
        NonlinearSource::SinhShift,
        NonlinearSource::TanhShift,
    ]
}

#[test]
fn eval_examples() {
    assert_eq!(NonlinearSource::FisherKPP.eval(0.5), -0.25);
    assert_eq!(NonlinearSource::FisherKPP.eval(2.0), 2.0);
    assert_eq!(NonlinearSource::SinhShift.eval(1.0), 0.0);
    assert!(matches!(NonlinearSource::ExpExp.try_eval(800.0), Err(Error::Range { .. })));
    assert!(NonlinearSource::power_fisher(1.0, 2.0).is_err());
}

#[test]
fn catalog_vanishes_at_zero_and_one() {
    for f in catalog() {
        assert_eq!(f.eval(0.0), 0.0, "{f:?}");
        assert_eq!(f.eval(1.0), 0.0, "{f:?}");
    }
}

type Form = (NonlinearSource, fn(f64) -> f64);

#[test]
fn catalog_matches_the_printed_forms() {
    let forms: Vec<Form> = vec![
        (NonlinearSource::Logarithmic, |v| v * (v - 1.0) * (1.0 + v.abs()).ln()),
        (NonlinearSource::ExpExp, |v| (v.exp() - 1.0) * (v.exp() - std::f64::consts::E)),
        (NonlinearSource::ExpShift, |v| v * ((v - 1.0).exp() - 1.0)),
        (NonlinearSource::SinhShift, |v| (v - 1.0) * v.sinh()),
        (NonlinearSource::TanhShift, |v| v * (v - 1.0).tanh()),
    ];
    for (src, form) in forms {
        for i in 0..=80 {
            let y = -4.0 + 0.1 * i as f64;
            let (a, b) = (src.eval(y), form(y));
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{src:?} at {y}: {a} vs {b}");
        }
    }
    let pf = NonlinearSource::power_fisher(2.0, 3.0).unwrap();
    assert!((pf.eval(-2.0) - (-8.0) * (-4.0 - 1.0)).abs() < 1e-12);
}

#[test]
fn catalog_satisfies_the_sign_conditions() {
    for f in catalog() {
        let r = check_source_conditions(&f, 10_000, -5.0, 5.0).unwrap();
        assert!(r.pass(), "{f:?}: {r:?}");
    }
}

#[test]
fn source_condition_counterexamples() {
    let r = check_source_conditions(&NonlinearSource::custom("identity", |y| y), 1000, -2.0, 3.0).unwrap();
    assert!(!r.zero_at_one && r.zero_at_zero && !r.pass());
    let r = check_source_conditions(&NonlinearSource::custom("flipped", |y| -y * (y - 1.0)), 1000, -2.0, 3.0).unwrap();
    assert!(!r.negative_inside && !r.positive_outside && r.first_violation.is_some());
    let r = check_source_conditions(&NonlinearSource::custom("cusp", |y| y * (y - 1.0) * (1.0 + (y - 2.5).abs().sqrt())), 1000, -2.0, 3.0).unwrap();
    assert!(!r.locally_lipschitz);
    assert!(check_source_conditions(&NonlinearSource::FisherKPP, 50, -2.0, 3.0).is_err());
    assert!(check_source_conditions(&NonlinearSource::FisherKPP, 1000, -1.0, 3.0).is_err());
}

#[test]
fn convexity_examples() {
    let r = convexity_check(&NonlinearSource::FisherKPP, 10.0, 1000).unwrap();
    assert!(r.pass && (r.min_second_derivative - 2.0).abs() < 1e-6);
    let r = convexity_check(&NonlinearSource::FisherKPP, 50.0, 5000).unwrap();
    assert!(r.pass);
    let r = convexity_check(&NonlinearSource::custom("concave", |y| -y * y), 10.0, 1000).unwrap();
    assert!(!r.pass);
    // v tanh(v-1) bends down past v ≈ 1.5
    let r = convexity_check(&NonlinearSource::TanhShift, 10.0, 1000).unwrap();
    assert!(!r.pass && r.min_second_derivative < 0.0 && r.at > 1.0);
}

#[test]
fn power_fisher_is_concave_near_zero_and_convex_beyond() {
    // f'' = (p+q)(p+q-1) y^{p+q-2} - q(q-1) y^{q-2} changes sign at y*
    for (p, q) in [(2.0, 1.5), (1.3, 3.0), (3.0, 2.0)] {
        let f = NonlinearSource::power_fisher(p, q).unwrap();
        let r = convexity_check(&f, 50.0, 5000).unwrap();
        let y_star = f64::powf(q * (q - 1.0) / ((p + q) * (p + q - 1.0)), 1.0 / p);
        assert!(!r.pass && r.at < y_star, "p = {p}, q = {q}: {r:?}");
        let shifted = NonlinearSource::custom("tail", move |y| {
            let v = y + y_star;
            v.powf(q) * (v.powf(p) - 1.0)
        });
        assert!(convexity_check(&shifted, 50.0, 5000).unwrap().pass);
    }
}

#[test]
fn osgood_examples() {
    let r = osgood_tail(&NonlinearSource::FisherKPP, 2.0, 1e12).unwrap();
    assert!(r.converged && (r.integral_estimate - std::f64::consts::LN_2).abs() < 1e-6, "{r:?}");
    let r = osgood_tail(&NonlinearSource::custom("linear", |y| y), 2.0, 1e12).unwrap();
    assert!(!r.converged);
    let r = osgood_tail(&NonlinearSource::ExpExp, 2.0, 700.0).unwrap();
    assert!(r.converged && r.integral_estimate > 0.0);
    let r = osgood_tail(&NonlinearSource::custom("sign change", |y| y - 3.0), 2.0, 10.0);
    assert!(matches!(r, Err(Error::Precondition { .. })));
    assert!(osgood_tail(&NonlinearSource::FisherKPP, 1.0, 10.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fisher_osgood_tail_is_a_logarithm(m in 1.01f64..50.0) {
        let r = osgood_tail(&NonlinearSource::FisherKPP, m, 1e15).unwrap();
        prop_assert!(r.converged);
        prop_assert!((r.integral_estimate - (m / (m - 1.0)).ln()).abs() < 1e-6);
    }

    #[test]
    fn sign_pattern_pointwise(y in -5.0f64..5.0, which in 0usize..8) {
        let f = &catalog()[which];
        let v = f.eval(y);
        if y > 0.0 && y < 1.0 {
            prop_assert!(v < 0.0);
        } else if y != 0.0 && y != 1.0 {
            prop_assert!(v > 0.0);
        }
    }
}
