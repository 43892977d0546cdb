//! Special functions behind the Sonine kernel catalog.
//!
//! Every routine is a pure function of its arguments. The `*_eval` variants
//! return an [`EvalResult`] carrying an a-posteriori absolute error estimate;
//! the plain variants return the value alone.

mod bessel;
mod expint;
mod gamma;
mod mittag_leffler;

pub use bessel::{bessel_i, bessel_i_eval, bessel_j, bessel_j_eval};
pub use expint::{exp_integral_e1, exp_integral_e1_eval, exp_integral_e1_scaled};
pub use gamma::{gamma, gamma_p, ln_gamma, rgamma};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_eval};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A function value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub est_abs_error: f64,
}

impl EvalResult {
    pub(crate) fn new(value: f64, est_abs_error: f64) -> Self {
        debug_assert!(est_abs_error.is_finite() && est_abs_error >= 0.0);
        Self { value, est_abs_error }
    }

    pub(crate) fn exact(value: f64) -> Self {
        Self { value, est_abs_error: f64::EPSILON * value.abs() }
    }
}
