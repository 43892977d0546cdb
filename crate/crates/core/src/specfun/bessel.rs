//! Bessel functions `J_ν` and `I_ν` of real order `ν > -1` and real argument `y ≥ 0`.
//!
//! `J_ν` uses the ascending series up to `y = 14` and the Hankel asymptotic
//! expansion beyond; `I_ν` uses the ascending series, whose terms are all
//! positive, up to `y = 700`.

use core::f64::consts::PI;
use num_traits::Float;

use super::gamma::{ln_gamma, rgamma};
use super::EvalResult;
use crate::error::{Error, Result};

const SERIES_LIMIT_J: f64 = 14.0;
const MAX_ARG_I: f64 = 700.0;
const MAX_ARG_J: f64 = 1e8;

fn check_order(nu: f64) -> Result<()> {
    if !(nu > -1.0) || !nu.is_finite() || nu > 50.0 {
        return Err(Error::Domain { what: "bessel order", value: nu });
    }
    Ok(())
}

fn at_zero(nu: f64, what: &'static str) -> Result<EvalResult> {
    if nu == 0.0 {
        Ok(EvalResult::exact(1.0))
    } else if nu > 0.0 {
        Ok(EvalResult::exact(0.0))
    } else {
        Err(Error::Range { what, value: 0.0 })
    }
}

/// `J_ν(y)`; see [`bessel_j_eval`].
pub fn bessel_j(nu: f64, y: f64) -> Result<f64> {
    bessel_j_eval(nu, y).map(|r| r.value)
}

/// `I_ν(y)`; see [`bessel_i_eval`].
pub fn bessel_i(nu: f64, y: f64) -> Result<f64> {
    bessel_i_eval(nu, y).map(|r| r.value)
}

/// Bessel function of the first kind with an error estimate.
///
/// For `ν < 0` the value is unbounded as `y → 0`, so `y = 0` is a range error there.
pub fn bessel_j_eval(nu: f64, y: f64) -> Result<EvalResult> {
    check_order(nu)?;
    if !(y >= 0.0) || y > MAX_ARG_J {
        return Err(Error::Range { what: "bessel_j argument", value: y });
    }
    if y == 0.0 {
        return at_zero(nu, "bessel_j argument");
    }
    if y <= SERIES_LIMIT_J {
        Ok(ascending(nu, y, -1.0))
    } else {
        hankel(nu, y)
    }
}

/// Modified Bessel function of the first kind with an error estimate.
pub fn bessel_i_eval(nu: f64, y: f64) -> Result<EvalResult> {
    check_order(nu)?;
    if !(y >= 0.0) || y > MAX_ARG_I {
        return Err(Error::Range { what: "bessel_i argument", value: y });
    }
    if y == 0.0 {
        return at_zero(nu, "bessel_i argument");
    }
    Ok(ascending(nu, y, 1.0))
}

/// `Σ_m sign^m (y/2)^{2m+ν} / (m! Γ(m+ν+1))`.
fn ascending(nu: f64, y: f64, sign: f64) -> EvalResult {
    let half = 0.5 * y;
    let q = sign * half * half;
    // leading term (y/2)^ν / Γ(ν+1), through logs when it could overflow
    let lead = if nu + 1.0 > 170.0 {
        (nu * half.ln() - ln_gamma(nu + 1.0)).exp()
    } else {
        half.powf(nu) * rgamma(nu + 1.0)
    };
    let mut term = lead;
    let mut sum = term;
    let mut max_term = term.abs();
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (m + nu));
        sum += term;
        max_term = max_term.max(term.abs());
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
        if m > 2000.0 {
            break;
        }
    }
    let err = 2.0 * f64::EPSILON * (max_term * m.sqrt() + sum.abs());
    EvalResult::new(sum, err)
}

/// Hankel's expansion `J_ν(y) = √(2/(πy)) (P cos ω - Q sin ω)`, `ω = y - νπ/2 - π/4`.
fn hankel(nu: f64, y: f64) -> Result<EvalResult> {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = a * (mu - odd * odd) / (k as f64 * 8.0 * y);
        if next.abs() > prev {
            break;
        }
        a = next;
        // a_k / y^k with alternating signs per pair
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        prev = a.abs();
        last = a.abs();
        if a == 0.0 || a.abs() < 1e-17 {
            break;
        }
    }
    let omega = y - (0.5 * nu + 0.25) * PI;
    let scale = (2.0 / (PI * y)).sqrt();
    let value = scale * (p * omega.cos() - q * omega.sin());
    let err = scale * (last + 4.0 * f64::EPSILON * (1.0 + y * f64::EPSILON));
    if err > 1e-10 {
        return Err(Error::Range { what: "bessel_j argument", value: y });
    }
    Ok(EvalResult::new(value, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-14);
        assert!(bessel_j(-0.5, 0.0).is_err());
    }

    #[test]
    fn half_orders_closed_form() {
        for y in [0.3, 2.0, 9.0, 13.9, 14.1, 20.0, 45.0] {
            let c = (2.0 / (PI * y)).sqrt();
            assert!((bessel_j(0.5, y).unwrap() - c * y.sin()).abs() < 1e-11, "y = {y}");
            assert!((bessel_j(-0.5, y).unwrap() - c * y.cos()).abs() < 1e-11, "y = {y}");
            assert!(((bessel_i(0.5, y).unwrap() - c * y.sinh()) / (c * y.sinh())).abs() < 1e-13);
            assert!(((bessel_i(-0.5, y).unwrap() - c * y.cosh()) / (c * y.cosh())).abs() < 1e-13);
        }
    }

    #[test]
    fn series_and_hankel_agree_at_switch() {
        for nu in [-0.6, 0.0, 0.4] {
            let s = ascending(nu, 14.5, -1.0).value;
            let h = hankel(nu, 14.5).unwrap().value;
            assert!((s - h).abs() < 1e-10, "nu = {nu}: {s} vs {h}");
        }
    }

    #[test]
    fn bad_order_is_domain_error() {
        assert!(matches!(bessel_j(-1.0, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_i(-1.5, 1.0), Err(Error::Domain { .. })));
    }
}
