//! Two-parameter Mittag-Leffler function `E_{α,β}(z) = Σ z^k / Γ(αk + β)` for real `z`.
//!
//! Strategy, chosen per argument:
//!
//! 1. closed forms for `α = 1, β ∈ {1, 2}`;
//! 2. the power series whenever its cancellation error (largest term times
//!    machine epsilon) stays below the target, which covers every `z > 0`
//!    and small negative `z`;
//! 3. for `z < 0`, `0 < α < 1`: the Poincaré asymptotic expansion
//!    `-Σ_{k≥1} z^{-k}/Γ(β - αk)` when its smallest term is below target;
//! 4. otherwise the integral representation along the positive real axis
//!    (valid for `|arg z| > απ`, `β < 1 + α`), with the recurrence
//!    `E_{α,β}(z) = (E_{α,β-α}(z) - 1/Γ(β-α)) / z` used to bring `β` into range.
//!
//! Arguments none of these can certify (α > 1 with strongly negative `z`,
//! `α = 1` with general `β` at large `|z|`) are a range error.

use core::f64::consts::PI;
use num_traits::Float;

use super::gamma::{ln_gamma, rgamma, sin_pi};
use super::EvalResult;
use crate::error::{Error, Result};
use crate::quad::exp_sinh;

const TARGET: f64 = 1e-12;
const MAX_TERMS: usize = 5000;

/// `E_{α,β}(z)`; see [`mittag_leffler_eval`].
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    mittag_leffler_eval(alpha, beta, z).map(|r| r.value)
}

/// `E_{α,β}(z)` with an absolute error estimate, for `α ∈ (0, 2]`.
pub fn mittag_leffler_eval(alpha: f64, beta: f64, z: f64) -> Result<EvalResult> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::Range { what: "mittag_leffler alpha", value: alpha });
    }
    if !beta.is_finite() || beta.abs() > 50.0 {
        return Err(Error::Range { what: "mittag_leffler beta", value: beta });
    }
    if !z.is_finite() {
        return Err(Error::Range { what: "mittag_leffler argument", value: z });
    }
    if z == 0.0 {
        return Ok(EvalResult::exact(rgamma(beta)));
    }
    if alpha == 1.0 && beta == 1.0 {
        return finite(EvalResult::exact(z.exp()), z);
    }
    if alpha == 1.0 && beta == 2.0 {
        return finite(EvalResult::exact(z.exp_m1() / z), z);
    }
    if let Some(r) = series(alpha, beta, z) {
        if r.est_abs_error <= TARGET || z > 0.0 {
            return finite(r, z);
        }
    }
    if z < 0.0 && alpha < 1.0 {
        if let Some(r) = asymptotic(alpha, beta, z) {
            return Ok(r);
        }
        return integral_with_recurrence(alpha, beta, z);
    }
    Err(Error::Range { what: "mittag_leffler argument", value: z })
}

fn finite(r: EvalResult, z: f64) -> Result<EvalResult> {
    if r.value.is_finite() && r.est_abs_error.is_finite() {
        Ok(r)
    } else {
        Err(Error::Range { what: "mittag_leffler argument", value: z })
    }
}

/// Power series; `None` if it fails to converge within `MAX_TERMS`.
fn series(alpha: f64, beta: f64, z: f64) -> Option<EvalResult> {
    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut max_term: f64 = 0.0;
    let mut small_run = 0;
    for k in 0..MAX_TERMS {
        let arg = alpha * k as f64 + beta;
        let mag = if arg > 170.0 {
            (k as f64 * ln_abs_z - ln_gamma(arg)).exp()
        } else {
            (k as f64 * ln_abs_z).exp() * rgamma(arg)
        };
        if !mag.is_finite() {
            return None;
        }
        let term = if negative && k % 2 == 1 { -mag } else { mag };
        // Kahan–Babuška summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        max_term = max_term.max(mag.abs());
        if arg > 1.0 && mag.abs() <= f64::EPSILON * 1e-3 * (sum + comp).abs().max(1e-300) {
            small_run += 1;
            if small_run >= 3 {
                let value = sum + comp;
                let err = 4.0 * f64::EPSILON * max_term * (k as f64).sqrt().max(1.0)
                    + f64::EPSILON * value.abs();
                return Some(EvalResult::new(value, err));
            }
        } else {
            small_run = 0;
        }
    }
    None
}

/// Asymptotic expansion for `z → -∞` (`0 < α < 1`); `None` when the
/// optimally truncated series is not accurate enough.
fn asymptotic(alpha: f64, beta: f64, z: f64) -> Option<EvalResult> {
    let inv = 1.0 / z;
    let mut power = 1.0;
    let mut sum = 0.0;
    let mut prev_mag = f64::INFINITY;
    for k in 1..200 {
        power *= inv;
        let coef = rgamma(beta - alpha * k as f64);
        let term = -power * coef;
        let mag = term.abs();
        if coef != 0.0 && mag > prev_mag {
            // terms started growing: the last included term bounds the error
            return accept(sum, prev_mag);
        }
        sum += term;
        if coef != 0.0 {
            prev_mag = mag;
        }
        if mag != 0.0 && mag < 1e-17 * sum.abs() {
            return accept(sum, mag);
        }
    }
    accept(sum, prev_mag)
}

fn accept(value: f64, err: f64) -> Option<EvalResult> {
    if err <= TARGET && value.is_finite() {
        Some(EvalResult::new(value, err + f64::EPSILON * value.abs()))
    } else {
        None
    }
}

fn integral_with_recurrence(alpha: f64, beta: f64, z: f64) -> Result<EvalResult> {
    if beta < 1.0 + alpha {
        return integral(alpha, beta, z);
    }
    // E_{α,β}(z) = (E_{α,β-α}(z) - 1/Γ(β-α)) / z
    let inner = integral_with_recurrence(alpha, beta - alpha, z)?;
    let value = (inner.value - rgamma(beta - alpha)) / z;
    let err = (inner.est_abs_error + f64::EPSILON * rgamma(beta - alpha).abs()) / z.abs();
    Ok(EvalResult::new(value, err))
}

/// Integral representation for `z < 0`, `0 < α < 1`, `β < 1 + α`.
///
/// With `χ = r^α` the kernel becomes
/// `r^{α-β} e^{-r} (r^α sin π(1-β) - z sin π(1-β+α)) / (π (r^{2α} - 2 r^α z cos απ + z²))`.
fn integral(alpha: f64, beta: f64, z: f64) -> Result<EvalResult> {
    let s1 = sin_pi(1.0 - beta);
    let s2 = sin_pi(1.0 - beta + alpha);
    let c = (PI * alpha).cos();
    let integrand = |r: f64| {
        let ra = r.powf(alpha);
        let num = ra * s1 - z * s2;
        let den = ra * ra - 2.0 * ra * z * c + z * z;
        r.powf(alpha - beta) * (-r).exp() * num / (PI * den)
    };
    let q = exp_sinh(integrand, 0.0, 1e-14, 1e-14)
        .map_err(|_| Error::Numerical { what: "mittag_leffler integral", at: z })?;
    Ok(EvalResult::new(q.value, q.abs_error + 8.0 * f64::EPSILON * q.value.abs()))
}
