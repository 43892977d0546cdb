//! Reaction terms `f` vanishing at 0 and 1, negative in between and positive outside.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::gauss_kronrod;

/// A user-supplied reaction term.
pub type CustomFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A reaction term `f(u)`.
#[derive(Clone)]
pub enum NonlinearSource {
    /// `v(v - 1)`
    FisherKPP,
    /// `|v|^{q-1} v (|v|^{p-1} v - 1)`, `p, q > 1`
    PowerFisher { p: f64, q: f64 },
    /// `v(v - 1) ln(1 + |v|)`
    Logarithmic,
    /// `(e^v - 1)(e^v - e)`
    ExpExp,
    /// `v(e^{v-1} - 1)`
    ExpShift,
    /// `(v - 1) sinh v`
    SinhShift,
    /// `v tanh(v - 1)`
    TanhShift,
    /// Anything else; not checked at construction.
    Custom { name: String, f: CustomFn },
}

impl fmt::Debug for NonlinearSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearSource::FisherKPP => f.write_str("FisherKPP"),
            NonlinearSource::PowerFisher { p, q } => write!(f, "PowerFisher {{ p: {p}, q: {q} }}"),
            NonlinearSource::Logarithmic => f.write_str("Logarithmic"),
            NonlinearSource::ExpExp => f.write_str("ExpExp"),
            NonlinearSource::ExpShift => f.write_str("ExpShift"),
            NonlinearSource::SinhShift => f.write_str("SinhShift"),
            NonlinearSource::TanhShift => f.write_str("TanhShift"),
            NonlinearSource::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

fn signed_pow(v: f64, e: f64) -> f64 {
    v.abs().powf(e - 1.0) * v
}

impl NonlinearSource {
    pub fn power_fisher(p: f64, q: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter { what: "p", value: p });
        }
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::InvalidParameter { what: "q", value: q });
        }
        Ok(NonlinearSource::PowerFisher { p, q })
    }

    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(name: &str, f: F) -> Self {
        NonlinearSource::Custom { name: name.into(), f: Arc::new(f) }
    }

    /// `f(y)`; may be infinite for extreme `y`.
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            NonlinearSource::FisherKPP => y * (y - 1.0),
            NonlinearSource::PowerFisher { p, q } => signed_pow(y, *q) * (signed_pow(y, *p) - 1.0),
            NonlinearSource::Logarithmic => y * (y - 1.0) * y.abs().ln_1p(),
            NonlinearSource::ExpExp => {
                // e^v - e = e·(e^{v-1} - 1)
                y.exp_m1() * core::f64::consts::E * (y - 1.0).exp_m1()
            }
            NonlinearSource::ExpShift => y * (y - 1.0).exp_m1(),
            NonlinearSource::SinhShift => (y - 1.0) * y.sinh(),
            NonlinearSource::TanhShift => y * (y - 1.0).tanh(),
            NonlinearSource::Custom { f, .. } => f(y),
        }
    }

    /// `f(y)`, with overflow reported as a range error.
    pub fn try_eval(&self, y: f64) -> Result<f64> {
        let v = self.eval(y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Range { what: "nonlinear source overflow", value: y })
        }
    }

    pub fn name(&self) -> &str {
        match self {
            NonlinearSource::FisherKPP => "FisherKPP",
            NonlinearSource::PowerFisher { .. } => "PowerFisher",
            NonlinearSource::Logarithmic => "Logarithmic",
            NonlinearSource::ExpExp => "ExpExp",
            NonlinearSource::ExpShift => "ExpShift",
            NonlinearSource::SinhShift => "SinhShift",
            NonlinearSource::TanhShift => "TanhShift",
            NonlinearSource::Custom { name, .. } => name,
        }
    }
}

/// Clause-by-clause outcome of [`check_source_conditions`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceConditionReport {
    pub zero_at_zero: bool,
    pub zero_at_one: bool,
    /// `f < 0` on every sample in `(0, 1)`.
    pub negative_inside: bool,
    /// `f > 0` on every sample outside `[0, 1]`.
    pub positive_outside: bool,
    /// Difference quotients stay bounded under refinement on unit subranges.
    pub locally_lipschitz: bool,
    /// First sample that broke a sign clause.
    pub first_violation: Option<f64>,
}

impl SourceConditionReport {
    pub fn pass(&self) -> bool {
        self.zero_at_zero
            && self.zero_at_one
            && self.negative_inside
            && self.positive_outside
            && self.locally_lipschitz
    }
}

/// Samples the sign pattern and local Lipschitz continuity of `f` on `[y_min, y_max]`.
pub fn check_source_conditions(
    source: &NonlinearSource,
    n_samples: usize,
    y_min: f64,
    y_max: f64,
) -> Result<SourceConditionReport> {
    if n_samples < 100 {
        return Err(Error::InvalidParameter { what: "n_samples", value: n_samples as f64 });
    }
    if !(y_min <= -2.0 && y_max >= 3.0) {
        return Err(Error::InvalidParameter { what: "sample range must cover [-2, 3]", value: y_min });
    }
    let mut report = SourceConditionReport {
        zero_at_zero: source.eval(0.0) == 0.0,
        zero_at_one: source.eval(1.0) == 0.0,
        negative_inside: true,
        positive_outside: true,
        locally_lipschitz: true,
        first_violation: None,
    };
    let h = (y_max - y_min) / (n_samples - 1) as f64;
    for i in 0..n_samples {
        let y = y_min + h * i as f64;
        if y == 0.0 || y == 1.0 {
            continue;
        }
        let v = source.eval(y);
        let ok = if y > 0.0 && y < 1.0 { v < 0.0 } else { v > 0.0 };
        if !ok {
            if y > 0.0 && y < 1.0 {
                report.negative_inside = false;
            } else {
                report.positive_outside = false;
            }
            report.first_violation.get_or_insert(y);
        }
    }
    // Lipschitz: the largest difference quotient on each unit subrange must settle
    // when the sampling is refined fourfold.
    let mut lo = y_min;
    while lo < y_max {
        let hi = (lo + 1.0).min(y_max);
        let coarse = max_quotient(source, lo, hi, 256);
        let fine = max_quotient(source, lo, hi, 1024);
        let settled = fine.is_finite() && fine <= 1.1 * coarse + 1e-9 * (1.0 + coarse);
        if !settled {
            report.locally_lipschitz = false;
        }
        lo = hi;
    }
    Ok(report)
}

fn max_quotient(source: &NonlinearSource, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut prev = source.eval(lo);
    let mut worst: f64 = 0.0;
    for i in 1..=n {
        let cur = source.eval(lo + h * i as f64);
        worst = worst.max(((cur - prev) / h).abs());
        prev = cur;
    }
    worst
}

/// Outcome of [`convexity_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityReport {
    /// Smallest estimate of `f''` over the interior samples.
    pub min_second_derivative: f64,
    /// Where it was attained.
    pub at: f64,
    pub pass: bool,
}

/// Central second differences of `f` on `[0, y_max]`; passes when none is below `-1e-8`
/// (beyond the rounding noise of the stencil).
pub fn convexity_check(source: &NonlinearSource, y_max: f64, n_samples: usize) -> Result<ConvexityReport> {
    if !(y_max >= 3.0) {
        return Err(Error::InvalidParameter { what: "y_max", value: y_max });
    }
    if n_samples < 3 {
        return Err(Error::InvalidParameter { what: "n_samples", value: n_samples as f64 });
    }
    let h = y_max / (n_samples - 1) as f64;
    let mut min_d2 = f64::INFINITY;
    let mut at = 0.0;
    let mut pass = true;
    for i in 1..n_samples - 1 {
        let y = h * i as f64;
        let (a, b, c) = (source.eval(y - h), source.eval(y), source.eval(y + h));
        let d2 = (a - 2.0 * b + c) / (h * h);
        let noise = 8.0 * f64::EPSILON * a.abs().max(b.abs()).max(c.abs()) / (h * h);
        if d2 < min_d2 {
            min_d2 = d2;
            at = y;
        }
        if !(d2 >= -1e-8 - noise) {
            pass = false;
        }
    }
    Ok(ConvexityReport { min_second_derivative: min_d2, at, pass })
}

/// Outcome of [`osgood_tail`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OsgoodReport {
    /// `∫_m^Y dy/f(y)` at the last upper limit, plus a geometric tail estimate when converged.
    pub integral_estimate: f64,
    pub converged: bool,
    /// Last upper limit `Y` used.
    pub upper_limit: f64,
}

/// `∫_m^∞ dy/f(y)` by doubling the upper limit up to `y_max`.
///
/// Converged when one doubling adds less than `1e-6`.
pub fn osgood_tail(source: &NonlinearSource, m: f64, y_max: f64) -> Result<OsgoodReport> {
    if !(m > 1.0) || !m.is_finite() {
        return Err(Error::InvalidParameter { what: "m", value: m });
    }
    if !(y_max > m) {
        return Err(Error::InvalidParameter { what: "y_max", value: y_max });
    }
    let mut total = 0.0;
    let mut lo = m;
    let mut last_inc = f64::NAN;
    while lo < y_max {
        let hi = (2.0 * lo).min(y_max);
        let mut bad = None;
        let q = gauss_kronrod(
            |y| {
                let v = source.eval(y);
                if !(v > 0.0) && v.is_finite() {
                    bad.get_or_insert(y);
                }
                if v.is_infinite() {
                    0.0
                } else {
                    1.0 / v
                }
            },
            lo,
            hi,
            1e-14,
            1e-12,
        );
        if let Some(y) = bad {
            return Err(Error::Precondition { what: "f must be positive on [m, y_max]", at: y });
        }
        let q = q?;
        total += q.value;
        let prev_inc = last_inc;
        last_inc = q.value;
        lo = hi;
        if last_inc.abs() < 1e-6 {
            let ratio = last_inc / prev_inc;
            let tail = if ratio > 0.0 && ratio < 1.0 { last_inc * ratio / (1.0 - ratio) } else { 0.0 };
            return Ok(OsgoodReport { integral_estimate: total + tail, converged: true, upper_limit: hi });
        }
    }
    Ok(OsgoodReport { integral_estimate: total, converged: false, upper_limit: lo })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_zeros_are_exact() {
        let all = [
            NonlinearSource::FisherKPP,
            NonlinearSource::power_fisher(2.0, 3.0).unwrap(),
            NonlinearSource::Logarithmic,
            NonlinearSource::ExpExp,
            NonlinearSource::ExpShift,
            NonlinearSource::SinhShift,
            NonlinearSource::TanhShift,
        ];
        for f in &all {
            assert_eq!(f.eval(0.0), 0.0, "{f:?}");
            assert_eq!(f.eval(1.0), 0.0, "{f:?}");
        }
    }

    #[test]
    fn spot_values() {
        assert_eq!(NonlinearSource::FisherKPP.eval(0.5), -0.25);
        assert_eq!(NonlinearSource::FisherKPP.eval(2.0), 2.0);
        assert_eq!(NonlinearSource::SinhShift.eval(1.0), 0.0);
        assert!(NonlinearSource::ExpExp.try_eval(800.0).is_err());
    }

    #[test]
    fn counterexamples_fail() {
        let id = NonlinearSource::custom("identity", |y| y);
        let r = check_source_conditions(&id, 1000, -5.0, 5.0).unwrap();
        assert!(!r.zero_at_one && !r.pass());
        let neg = NonlinearSource::custom("minus square", |y| -y * y);
        assert!(!convexity_check(&neg, 10.0, 1000).unwrap().pass);
        let sqrt = NonlinearSource::custom("sqrt", |y: f64| y.abs().sqrt() * (y - 1.0).signum());
        assert!(!check_source_conditions(&sqrt, 1000, -5.0, 5.0).unwrap().locally_lipschitz);
    }
}
