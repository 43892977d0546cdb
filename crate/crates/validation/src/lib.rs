//! Tolerances, sizes and runtime budgets of the acceptance criteria. The
//! `acceptance` test target checks each criterion against these values.

use std::time::Duration;

pub const SONINE_TOL: f64 = 1e-6;
pub const SONINE_BUDGET: Duration = Duration::from_secs(60);

pub const CONVERGENCE_STEPS: [usize; 5] = [256, 512, 1024, 2048, 4096];
pub const CONVERGENCE_MODES: usize = 16;
pub const CONVERGENCE_MAX_ERROR: f64 = 1e-3;
pub const CONVERGENCE_BUDGET: Duration = Duration::from_secs(120);

pub const INVARIANCE_CASES: usize = 30;
pub const INVARIANCE_TOL: f64 = 1e-6;
pub const INVARIANCE_HORIZON: f64 = 2.0;
pub const INVARIANCE_BUDGET: Duration = Duration::from_secs(300);

pub const DECAY_TOL: f64 = 1e-3;
pub const DECAY_SLOPE_REL: f64 = 0.15;
pub const DECAY_BUDGET: Duration = Duration::from_secs(300);
pub const MAJORANT_TOL: f64 = 1e-3;

pub const DIRAC_MAX_WIDTH: f64 = 1e-2;
pub const BRACKET_SLACK: f64 = 0.1;
pub const BLOWUP_ALPHA: f64 = 0.5;
pub const BLOWUP_C0S: [f64; 2] = [4.0, 8.0];
pub const BLOWUP_STEPS: usize = 2048;
pub const BLOWUP_THRESHOLD: f64 = 1e6;
pub const BLOWUP_BUDGET: Duration = Duration::from_secs(600);

pub const QUASILINEAR_CASES: usize = 9;
pub const QUASILINEAR_REL: f64 = 0.1;
pub const QUASILINEAR_BUDGET: Duration = Duration::from_secs(300);

pub const SPECFUN_BUDGET: Duration = Duration::from_secs(10);
