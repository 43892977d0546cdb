use std::f64::consts::PI;

use proptest::prelude::*;
use sonine_core::specfun::{bessel_i, bessel_j, exp_integral_e1, gamma, mittag_leffler, mittag_leffler_eval};
use sonine_core::Error;

/// Composite Simpson rule with `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// `Γ(k/2 + 1)` from `Γ(1) = 1`, `Γ(3/2) = √π/2` and `Γ(x+1) = xΓ(x)`.
fn gamma_half_integer_plus_one(k: usize) -> f64 {
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 0.5 * PI.sqrt() };
    let mut a = if k.is_multiple_of(2) { 1.0 } else { 1.5 };
    while a < k as f64 / 2.0 + 1.0 - 1e-9 {
        x *= a;
        a += 1.0;
    }
    x
}

#[test]
fn gamma_small_values() {
    assert_eq!(gamma(1.0).unwrap(), 1.0);
    assert!((gamma(4.0).unwrap() - 6.0).abs() < 1e-13 * 6.0);
    assert!((gamma(0.5).unwrap() - 1.772_453_850_905_52).abs() < 1e-13);
    for x in [0.0, -1.0, -2.0, -17.0] {
        assert!(matches!(gamma(x), Err(Error::Domain { .. })), "pole at {x}");
    }
}

#[test]
fn gamma_half_integers_match_the_recurrence_oracle() {
    for k in 0..60 {
        let x = k as f64 / 2.0 + 1.0;
        let want = gamma_half_integer_plus_one(k);
        let got = gamma(x).unwrap();
        assert!(((got - want) / want).abs() < 1e-13, "Γ({x}) = {got}, want {want}");
    }
}

proptest! {
    #[test]
    fn gamma_recurrence(x in 0.1f64..10.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!(((lhs - rhs) / rhs).abs() < 1e-12);
    }

    #[test]
    fn mittag_leffler_at_zero_is_one(alpha in 0.01f64..2.0) {
        prop_assert_eq!(mittag_leffler(alpha, 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn relaxation_is_a_decreasing_fraction(alpha in 0.1f64..1.0, a in 0.0f64..100.0, b in 0.0f64..100.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let e_lo = mittag_leffler(alpha, 1.0, -lo).unwrap();
        let e_hi = mittag_leffler(alpha, 1.0, -hi).unwrap();
        prop_assert!(e_hi > 0.0 && e_lo <= 1.0);
        prop_assert!(e_hi <= e_lo + 1e-12);
    }
}

#[test]
fn mittag_leffler_closed_forms() {
    assert!((mittag_leffler(1.0, 1.0, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-13);
    assert!(mittag_leffler(2.0, 1.0, -(PI / 2.0).powi(2)).unwrap().abs() < 1e-10);
    for z in [-0.5, 0.5, -2.0, 2.0] {
        let want = (f64::exp(z) - 1.0) / z;
        assert!((mittag_leffler(1.0, 2.0, z).unwrap() - want).abs() < 1e-10, "z = {z}");
    }
}

#[test]
fn mittag_leffler_half_order_against_direct_series() {
    // E_{1/2}(-1) = Σ (-1)^k / Γ(k/2 + 1), summed in pairs of decreasing terms
    let mut sum = 0.0;
    for k in (0..200).rev() {
        let term = 1.0 / gamma_half_integer_plus_one(k);
        sum += if k % 2 == 0 { term } else { -term };
    }
    // cross-check: e·erfc(1)
    let erfc_one = 0.157_299_207_050_285_13;
    assert!((sum - std::f64::consts::E * erfc_one).abs() < 1e-14);
    let got = mittag_leffler_eval(0.5, 1.0, -1.0).unwrap();
    assert!((got.value - sum).abs() < 1e-10, "{} vs {sum}", got.value);
    assert!(got.est_abs_error.is_finite() && got.est_abs_error >= 0.0);
}

#[test]
fn mittag_leffler_declared_range() {
    for alpha in [0.1, 0.3, 0.5, 0.7, 1.0] {
        for z in [-100.0, -37.5, -5.0, -1.0, -1e-3] {
            let r = mittag_leffler_eval(alpha, 1.0, z).unwrap();
            assert!(r.value.is_finite() && r.est_abs_error.is_finite(), "α = {alpha}, z = {z}");
        }
        // growth like exp(z^{1/α}) overflows for large positive z
        for z in [0.5, 3.0, 100.0] {
            match mittag_leffler_eval(alpha, 1.0, z) {
                Ok(r) => assert!(r.value.is_finite() && r.value > 1.0),
                Err(e) => assert!(matches!(e, Error::Range { .. }), "{e}"),
            }
        }
    }
    assert!(matches!(mittag_leffler(2.5, 1.0, 1.0), Err(Error::Range { .. })));
}

#[test]
fn bessel_trivial_values() {
    assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
    assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
    assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-10);
    assert!(matches!(bessel_j(-1.0, 1.0), Err(Error::Domain { .. })));
    assert!(matches!(bessel_i(-1.5, 1.0), Err(Error::Domain { .. })));
}

#[test]
fn bessel_i_matches_its_integral_representation() {
    // I_ν(y) = (1/π)∫₀^π e^{y cos θ} cos νθ dθ − (sin νπ/π)∫₀^∞ e^{−y cosh τ − ντ} dτ
    for nu in [-0.9, -0.5, -0.1] {
        for y in [0.3, 1.0, 2.5, 7.0] {
            let first = simpson(|th| (y * th.cos()).exp() * (nu * th).cos(), 0.0, PI, 4000) / PI;
            let tail = simpson(|tau| (-y * tau.cosh() - nu * tau).exp(), 0.0, 12.0, 24000);
            let want = first - (nu * PI).sin() / PI * tail;
            let got = bessel_i(nu, y).unwrap();
            assert!((got - want).abs() < 1e-8, "I_{nu}({y}) = {got}, oracle {want}");
            assert!(got > 0.0);
        }
    }
}

#[test]
fn bessel_j_negative_order_matches_its_integral_representation() {
    // J_ν(y) = (1/π)∫₀^π cos(νθ − y sin θ) dθ − (sin νπ/π)∫₀^∞ e^{−y sinh τ − ντ} dτ
    for nu in [-0.6, -0.3] {
        for y in [0.5, 2.0, 9.0] {
            let first = simpson(|th| (nu * th - y * th.sin()).cos(), 0.0, PI, 4000) / PI;
            let tail = simpson(|tau| (-y * tau.sinh() - nu * tau).exp(), 0.0, 14.0, 56000);
            let want = first - (nu * PI).sin() / PI * tail;
            let got = bessel_j(nu, y).unwrap();
            assert!((got - want).abs() < 1e-8, "J_{nu}({y}) = {got}, oracle {want}");
        }
    }
}

#[test]
fn e1_at_one_matches_quadrature() {
    // ∫₁^∞ e^{-u}/u du = ∫₀¹ e^{-1/s}/s ds
    let oracle = simpson(|s| if s == 0.0 { 0.0 } else { (-1.0 / s).exp() / s }, 0.0, 1.0, 20000);
    let got = exp_integral_e1(1.0).unwrap();
    assert!((got - oracle).abs() < 1e-10 * oracle, "{got} vs {oracle}");
}

#[test]
fn e1_tail_and_monotonicity() {
    let t = 30.0;
    let ratio = exp_integral_e1(t).unwrap() / ((-t).exp() / t);
    assert!((0.9..=1.0).contains(&ratio), "ratio {ratio}");
    let mut prev = f64::INFINITY;
    for i in 1..=400 {
        let v = exp_integral_e1(0.05 * i as f64).unwrap();
        assert!(v > 0.0 && v < prev);
        prev = v;
    }
    assert!(matches!(exp_integral_e1(0.0), Err(Error::Domain { .. })));
    assert!(matches!(exp_integral_e1(-1.0), Err(Error::Domain { .. })));
}
