use core::f64::consts::PI;
use num_traits::Float;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

fn lanczos_sum(y: f64) -> f64 {
    let mut a = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (y + i as f64);
    }
    a
}

/// `sin(πx)` with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    // r ∈ [-1, 1]
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(x) for x ≥ 0.5 by Lanczos.
fn gamma_positive(x: f64) -> f64 {
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    let a = lanczos_sum(y);
    // split the power so that t^(y+1/2) e^{-t} does not overflow early
    let half = t.powf(0.5 * (y + 0.5));
    SQRT_2PI * half * (-t).exp() * half * a
}

/// `Γ(x) = (x-1)!` for integral `x ∈ [1, 23]`, exact in f64.
fn small_factorial(x: f64) -> Option<f64> {
    if x != x.floor() || !(1.0..=23.0).contains(&x) {
        return None;
    }
    let mut p = 1.0;
    let mut k = 2.0;
    while k < x {
        p *= k;
        k += 1.0;
    }
    Some(p)
}

/// Euler's Gamma function.
///
/// Poles at `0, -1, -2, ...` are a domain error; overflow (x ≳ 171.6) a range error.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || is_nonpositive_integer(x) {
        return Err(Error::Domain { what: "gamma", value: x });
    }
    let v = if x >= 0.5 {
        small_factorial(x).unwrap_or_else(|| gamma_positive(x))
    } else {
        PI / (sin_pi(x) * gamma_positive(1.0 - x))
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range { what: "gamma", value: x })
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return ln_gamma(x + 1.0) - x.ln();
    }
    let y = x - 1.0;
    let t = y + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (y + 0.5) * t.ln() - t + lanczos_sum(y).ln()
}

/// Reciprocal Gamma function `1/Γ(x)`, an entire function (zero at the poles of Γ).
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 170.0 {
        return (-ln_gamma(x)).exp();
    }
    if x >= 0.5 {
        return 1.0 / small_factorial(x).unwrap_or_else(|| gamma_positive(x));
    }
    if x < -170.0 {
        // 1/Γ(x) = sin(πx) Γ(1 - x) / π; Γ(1 - x) overflows, so go through logs.
        let s = sin_pi(x);
        return s.signum() * (s.abs().ln() + ln_gamma(1.0 - x) - PI.ln()).exp();
    }
    sin_pi(x) * gamma_positive(1.0 - x) / PI
}

/// Regularized lower incomplete Gamma function `P(a, x) = γ(a, x)/Γ(a)`.
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain { what: "gamma_p order", value: a });
    }
    if !(x >= 0.0) {
        return Err(Error::Domain { what: "gamma_p argument", value: x });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let prefactor = (-x + a * x.ln() - ln_gamma(a)).exp();
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                return Ok((sum * prefactor).min(1.0));
            }
        }
        Err(Error::Numerical { what: "gamma_p series", at: x })
    } else {
        // modified Lentz for the continued fraction of Q(a, x)
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                return Ok((1.0 - prefactor * h).max(0.0));
            }
        }
        Err(Error::Numerical { what: "gamma_p continued fraction", at: x })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn known_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(4.0).unwrap(), 6.0);
        assert!(rel(gamma(0.5).unwrap(), 1.772_453_850_905_516) < 1e-14);
        assert!(rel(gamma(1.5).unwrap(), 0.886_226_925_452_758) < 1e-14);
        assert!(rel(gamma(-0.5).unwrap(), -3.544_907_701_811_032) < 1e-14);
        // 49!
        assert!(rel(gamma(50.0).unwrap(), 6.082_818_640_342_675e62) < 1e-13);
        assert!(rel(gamma(0.05).unwrap(), 19.470_085_311_255_51) < 1e-13);
        assert!(rel(gamma(30.5).unwrap(), 4.822_696_933_490_909e31) < 1e-13);
    }

    #[test]
    fn poles_are_domain_errors() {
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma(x), Err(Error::Domain { .. })));
            assert_eq!(rgamma(x), 0.0);
        }
        assert!(matches!(gamma(200.0), Err(Error::Range { .. })));
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for x in [0.01, 0.3, 1.0, 2.0, 7.5, 40.0, 120.0] {
            assert!((ln_gamma(x) - gamma(x).unwrap().ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn incomplete_gamma_special_cases() {
        // P(1, x) = 1 - e^{-x}
        for x in [0.1, 1.0, 3.0, 30.0] {
            assert!((gamma_p(1.0, x).unwrap() - (1.0 - (-x).exp())).abs() < 1e-15);
        }
        // P(1/2, x) = erf(√x)
        for x in [0.01, 0.7, 2.0, 9.0] {
            assert!((gamma_p(0.5, x).unwrap() - libm::erf(x.sqrt())).abs() < 1e-14);
        }
    }
}
