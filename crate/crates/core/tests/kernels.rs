use proptest::prelude::*;
use sonine_core::kernels::{cumulative_l, g, make_pair, numeric_associate, verify_sonine};
use sonine_core::specfun::{exp_integral_e1, gamma};
use sonine_core::{Error, KernelPair, SonineSpec, TimeGrid};

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
    }
    s * h / 3.0
}

fn closed_form_pairs() -> Vec<SonineSpec> {
    vec![
        SonineSpec::RiemannLiouville { alpha: 0.3 },
        SonineSpec::RiemannLiouville { alpha: 0.7 },
        SonineSpec::Tempered { alpha: 0.5, mu: 1.0 },
        SonineSpec::BesselPair { alpha: 0.4 },
        SonineSpec::MittagLefflerPair { alpha: 0.3, beta: 0.7 },
        SonineSpec::DistributedOrder,
    ]
}

#[test]
fn catalog_spot_values() {
    let rl = make_pair(SonineSpec::RiemannLiouville { alpha: 0.5 }).unwrap();
    assert!((rl.k(1.0).unwrap() - 0.564_189_583_547_756).abs() < 1e-14);
    assert!((cumulative_l(&rl, 1.0).unwrap() - core::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-13);

    let dirac = make_pair(SonineSpec::Dirac).unwrap();
    for t in [0.1, 1.0, 2.5, 40.0] {
        assert_eq!(dirac.l(t).unwrap(), 1.0);
        assert_eq!(dirac.cum_l(t).unwrap(), t);
    }
    assert!(matches!(dirac.k(1.0), Err(Error::Unavailable(_))));
}

#[test]
fn mittag_leffler_pair_associate_at_one() {
    // E_{0.3,0.7}(-1) by its defining series
    let mut sum = 0.0;
    for k in (0..120).rev() {
        let term = 1.0 / gamma(0.3 * k as f64 + 0.7).unwrap();
        sum += if k % 2 == 0 { term } else { -term };
    }
    let pair = make_pair(SonineSpec::MittagLefflerPair { alpha: 0.3, beta: 0.7 }).unwrap();
    assert!((pair.l(1.0).unwrap() - sum).abs() < 1e-12);
}

#[test]
fn distributed_order_associate_is_a_laplace_integral() {
    // ∫₀^∞ e^{-st}/(1+s) ds with s = e^x
    for t in [0.1, 1.0, 5.0, 20.0] {
        let oracle = simpson(|x: f64| {
            let s = x.exp();
            (-s * t).exp() / (1.0 + s) * s
        }, -40.0, 8.0, 96_000);
        let closed = t.exp() * exp_integral_e1(t).unwrap();
        let pair = make_pair(SonineSpec::DistributedOrder).unwrap();
        assert!((closed - oracle).abs() < 1e-8, "t = {t}: {closed} vs {oracle}");
        assert!((pair.l(t).unwrap() - closed).abs() < 1e-12 * closed);
    }
}

#[test]
fn distributed_order_cumulative_at_ten() {
    // ∫₀^10 ∫₀^∞ e^{-σu}/(1+u) du dσ = ∫₀^∞ (1 - e^{-10u})/(u(1+u)) du, with u = e^x
    let oracle = simpson(|x: f64| {
        let u = x.exp();
        -(-10.0 * u).exp_m1() / (1.0 + u)
    }, -40.0, 40.0, 160_000);
    let pair = make_pair(SonineSpec::DistributedOrder).unwrap();
    let got = cumulative_l(&pair, 10.0).unwrap();
    assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
}

#[test]
fn tempered_associate_approaches_its_limit() {
    for (alpha, mu) in [(0.5, 1.0), (0.3, 2.0), (0.7, 0.5)] {
        let pair = make_pair(SonineSpec::Tempered { alpha, mu }).unwrap();
        let limit = f64::powf(mu, 1.0 - alpha);
        let l50 = pair.l(50.0).unwrap();
        assert!(((l50 - limit) / limit).abs() < 1e-3, "α = {alpha}, μ = {mu}: {l50} vs {limit}");
        // cum_l grows linearly
        let slope = (pair.cum_l(100.0).unwrap() - pair.cum_l(50.0).unwrap()) / 50.0;
        assert!(((slope - limit) / limit).abs() < 1e-3);
    }
}

#[test]
fn identity_holds_for_every_closed_form_pair() {
    let ts = [0.1, 0.25, 0.5, 1.0, 2.0, 5.0];
    for spec in closed_form_pairs() {
        let pair = make_pair(spec.clone()).unwrap();
        let r = verify_sonine(&pair, &ts, 1e-6).unwrap();
        assert!(r.pass, "{spec:?}: deviation {}", r.max_deviation);
        assert_eq!(r.samples.len(), ts.len());
    }
    let dirac = make_pair(SonineSpec::Dirac).unwrap();
    let r = verify_sonine(&dirac, &[0.5, 3.0], 1e-12).unwrap();
    assert!(r.pass && r.max_deviation == 0.0);
}

#[test]
fn identity_for_bessel_and_mittag_leffler_samples() {
    let bessel = make_pair(SonineSpec::BesselPair { alpha: 0.4 }).unwrap();
    assert!(verify_sonine(&bessel, &[0.25, 0.5, 1.0, 2.0], 1e-6).unwrap().pass);
    let ml = make_pair(SonineSpec::MittagLefflerPair { alpha: 0.3, beta: 0.7 }).unwrap();
    assert!(verify_sonine(&ml, &[0.5, 1.0, 2.0], 1e-6).unwrap().pass);
}

#[test]
fn verify_rejects_bad_samples() {
    let pair = make_pair(SonineSpec::RiemannLiouville { alpha: 0.5 }).unwrap();
    assert!(verify_sonine(&pair, &[0.0], 1e-6).is_err());
    assert!(verify_sonine(&pair, &[1.0], 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn identity_on_sampled_times(t in 0.1f64..5.0, which in 0usize..6) {
        let spec = closed_form_pairs()[which].clone();
        let pair = make_pair(spec).unwrap();
        let r = verify_sonine(&pair, &[t], 1e-6).unwrap();
        prop_assert!(r.pass, "t = {}: deviation {}", t, r.max_deviation);
    }
}

#[test]
fn kernels_are_nonnegative_and_nonincreasing() {
    let mut specs = closed_form_pairs();
    specs.retain(|s| !matches!(s, SonineSpec::BesselPair { .. }));
    specs.push(SonineSpec::MultiTerm { alphas: vec![0.8, 0.4] });
    for spec in specs {
        let pair = make_pair(spec.clone()).unwrap();
        let (mut k_prev, mut l_prev) = (f64::INFINITY, f64::INFINITY);
        for i in 0..400 {
            let t = 1e-3 * f64::powf(1e4 / 1e-3, i as f64 / 399.0);
            let (k, l) = (pair.k(t).unwrap(), pair.l(t).unwrap());
            assert!(k >= 0.0 && l >= 0.0, "{spec:?} at {t}");
            assert!(k <= k_prev * (1.0 + 1e-12), "{spec:?}: k increases at {t}");
            assert!(l <= l_prev * (1.0 + 1e-12), "{spec:?}: l increases at {t}");
            k_prev = k;
            l_prev = l;
        }
    }
}

#[test]
fn bessel_pair_is_not_monotone() {
    // k oscillates with the Bessel function and l grows like an exponential in √t
    let pair = make_pair(SonineSpec::BesselPair { alpha: 0.4 }).unwrap();
    assert!((1..200).any(|i| pair.k(0.1 * i as f64).unwrap() < 0.0));
    assert!(pair.l(10.0).unwrap() > pair.l(1.0).unwrap());
}

#[test]
fn cumulative_associate_starts_at_zero_and_grows() {
    let mut specs = closed_form_pairs();
    specs.push(SonineSpec::Dirac);
    specs.push(SonineSpec::MultiTerm { alphas: vec![0.8, 0.4] });
    for spec in specs {
        let pair = make_pair(spec.clone()).unwrap();
        assert_eq!(pair.cum_l(0.0).unwrap(), 0.0);
        let mut prev = 0.0;
        for i in 1..=200 {
            let c = pair.cum_l(0.25 * i as f64).unwrap();
            assert!(c >= prev, "{spec:?}");
            prev = c;
        }
        assert!(!pair.l_integrable_on_halfline());
        assert!(matches!(pair.cum_l(-1.0), Err(Error::Domain { .. })));
    }
}

#[test]
fn construction_checks_parameters() {
    let bad = [
        SonineSpec::RiemannLiouville { alpha: 1.0 },
        SonineSpec::RiemannLiouville { alpha: 0.0 },
        SonineSpec::Tempered { alpha: 0.5, mu: 0.0 },
        SonineSpec::BesselPair { alpha: 1.2 },
        SonineSpec::MittagLefflerPair { alpha: 0.7, beta: 0.3 },
        SonineSpec::MultiTerm { alphas: vec![0.4, 0.8] },
        SonineSpec::MultiTerm { alphas: vec![] },
    ];
    for spec in bad {
        assert!(matches!(KernelPair::new(spec.clone()), Err(Error::InvalidParameter { .. })), "{spec:?}");
    }
}

/// Max `|l_h - g_μ|` at midpoints in `[0.1, 1]` for `k = g_{1-μ}`.
fn associate_error(mu: f64) -> f64 {
    let spec = SonineSpec::RiemannLiouville { alpha: mu };
    let grid = TimeGrid::uniform(1.0, 65_536).unwrap();
    let sol = numeric_associate(&spec, &grid).unwrap();
    assert!(sol.node_residual <= 1e-6);
    sol.midpoints
        .iter()
        .zip(&sol.values)
        .filter(|(m, _)| **m >= 0.1)
        .map(|(m, v)| (v - g(mu, *m)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn associate_of_self_dual_kernel() {
    let err = associate_error(0.5);
    assert!(err <= 1e-4, "{err}");
}

#[test]
fn associate_of_power_kernel() {
    let err = associate_error(0.3);
    assert!(err <= 1e-4, "{err}");
}

#[test]
fn multi_term_associate_residual() {
    let spec = SonineSpec::MultiTerm { alphas: vec![0.8, 0.4] };
    let grid = TimeGrid::geometric(1e-8, 1e4, 4096).unwrap();
    let sol = numeric_associate(&spec, &grid).unwrap();
    assert!(sol.node_residual <= 1e-6, "{}", sol.node_residual);
    assert!(sol.values.iter().all(|v| *v > 0.0));
    let pair = make_pair(spec).unwrap();
    assert!(pair.cum_l(2e4).is_err());
    assert!(matches!(numeric_associate(&SonineSpec::Dirac, &grid), Err(Error::Unavailable(_))));
}
