//! Exponential integral `E₁(t) = ∫_t^∞ e^{-u}/u du` for `t > 0`.

use num_traits::Float;

use super::{EvalResult, EULER_GAMMA};
use crate::error::{Error, Result};

/// `E₁(t)`.
pub fn exp_integral_e1(t: f64) -> Result<f64> {
    exp_integral_e1_eval(t).map(|r| r.value)
}

/// `E₁(t)` with an error estimate; series for `t ≤ 1`, continued fraction above.
pub fn exp_integral_e1_eval(t: f64) -> Result<EvalResult> {
    check(t)?;
    if t <= 1.0 {
        Ok(series(t))
    } else {
        let s = continued_fraction(t)?;
        let scale = (-t).exp();
        Ok(EvalResult::new(s.value * scale, s.est_abs_error * scale))
    }
}

/// `e^t E₁(t)`, which stays finite (`~ 1/t`) where `E₁` underflows.
pub fn exp_integral_e1_scaled(t: f64) -> Result<f64> {
    check(t)?;
    if t <= 1.0 {
        Ok(series(t).value * t.exp())
    } else {
        continued_fraction(t).map(|r| r.value)
    }
}

fn check(t: f64) -> Result<()> {
    if !(t > 0.0) || t.is_nan() {
        return Err(Error::Domain { what: "exp_integral_e1", value: t });
    }
    if t.is_infinite() {
        return Err(Error::Range { what: "exp_integral_e1", value: t });
    }
    Ok(())
}

/// `E₁(t) = -γ - ln t - Σ_{k≥1} (-t)^k / (k·k!)`.
fn series(t: f64) -> EvalResult {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..100 {
        let kf = k as f64;
        term *= -t / kf;
        let add = term / kf;
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    let value = -EULER_GAMMA - t.ln() - sum;
    let err = 4.0 * f64::EPSILON * (EULER_GAMMA + t.ln().abs() + sum.abs());
    EvalResult::new(value, err)
}

/// Modified Lentz evaluation of `e^t E₁(t) = 1/(t+1- 1/(t+3- 4/(t+5- ...)))`.
fn continued_fraction(t: f64) -> Result<EvalResult> {
    const TINY: f64 = 1e-300;
    let mut b = t + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(EvalResult::new(h, 8.0 * f64::EPSILON * h));
        }
    }
    Err(Error::Numerical { what: "exp_integral_e1 continued fraction", at: t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::exp_sinh;

    #[test]
    fn matches_quadrature() {
        for t in [0.01, 0.5, 1.0, 1.5, 4.0, 20.0] {
            let q = exp_sinh(|u| (-u).exp() / u, t, 1e-15, 1e-13).unwrap();
            let v = exp_integral_e1(t).unwrap();
            assert!(((v - q.value) / q.value).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn leading_asymptotics_and_domain() {
        let t = 30.0;
        let ratio = exp_integral_e1(t).unwrap() / ((-t).exp() / t);
        assert!((0.9..=1.0).contains(&ratio));
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(-1.0).is_err());
        let s = exp_integral_e1_scaled(800.0).unwrap();
        assert!((s * 800.0 - 1.0).abs() < 2e-3);
    }
}
