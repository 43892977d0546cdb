use serde::{Deserialize, Serialize};
use serde_json::json;
use sonine_core::kernels::make_pair;
use sonine_core::pde::{solve, Tolerances};
use sonine_core::spatial::build_operator;
use sonine_core::specfun::mittag_leffler;
use sonine_core::{Field, NonlinearSource, OperatorKind, ProblemSpec, SonineSpec, TimeGrid};

use super::{Artifact, CaseOutput, Check, Job};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub steps: Vec<usize>,
    pub modes: usize,
    pub horizon: f64,
    /// Largest admissible error at the finest resolution.
    pub max_error: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self { steps: vec![256, 512, 1024, 2048, 4096], modes: 16, horizon: 1.0, max_error: 1e-3 }
    }
}

/// `|u_1(T) − E_α(−π² T^α)|` for `u₀ = e₁`, `f = 0`, plus leakage into other modes.
pub fn relaxation_error(alpha: f64, modes: usize, grid: TimeGrid) -> sonine_core::Result<f64> {
    let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, modes)?;
    let u0 = Field::eigenmode(&op, 0, 1.0);
    let lambda = op.eigenvalues()[0];
    let problem = ProblemSpec {
        pair: make_pair(SonineSpec::RiemannLiouville { alpha })?,
        op,
        source: NonlinearSource::custom("zero", |_| 0.0),
        u0,
        grid,
        tolerances: Tolerances::default(),
        keep_fields: true,
    };
    let r = solve(&problem)?;
    if !r.is_completed() {
        return Err(sonine_core::Error::Numerical { what: "linear run did not complete", at: 0.0 });
    }
    let fields = r.fields.as_ref().ok_or(sonine_core::Error::Unavailable("fields"))?;
    let t = *r.times.last().expect("nonempty");
    let exact = mittag_leffler(alpha, 1.0, -lambda * t.powf(alpha))?;
    let last = fields.last().expect("nonempty");
    let leakage = last[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    Ok((last[0] - exact).abs().max(leakage))
}

/// Least-squares slope of `-ln e` against `ln N`.
pub fn observed_order(steps: &[usize], errors: &[f64]) -> f64 {
    let n = steps.len() as f64;
    let xs: Vec<f64> = steps.iter().map(|&s| (s as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| -e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn case(cfg: &ConvergenceConfig, name: &'static str, alpha: f64, r: f64, min_order: Option<f64>) -> CaseOutput {
    let params = json!({"alpha": alpha, "grading_r": r, "steps": cfg.steps, "modes": cfg.modes, "T": cfg.horizon});
    let run = || -> sonine_core::Result<CaseOutput> {
        let errors: Vec<f64> = cfg
            .steps
            .iter()
            .map(|&n| relaxation_error(alpha, cfg.modes, TimeGrid::graded(cfg.horizon, n, r)?))
            .collect::<sonine_core::Result<_>>()?;
        let monotone = errors.windows(2).all(|w| w[1] < w[0]);
        let order = observed_order(&cfg.steps, &errors);
        let finest = *errors.last().unwrap_or(&f64::NAN);
        let mut checks = vec![Check::new("convergence-monotone", finest, "errors decrease with N", monotone)];
        match min_order {
            Some(p) => checks.push(Check::new("convergence-order", order, format!("observed order >= {p}"), order >= p)),
            None => checks.push(Check::info("convergence-order", order, "reported", true)),
        }
        if alpha == 0.5 && r == 1.0 {
            checks.push(Check::new("convergence-accuracy", finest, format!("error at N = {} <= {}", cfg.steps.last().unwrap_or(&0), cfg.max_error), finest <= cfg.max_error));
        }
        let rows = cfg.steps.iter().zip(&errors).map(|(&n, &e)| vec![n as f64, e]).collect();
        Ok(CaseOutput::new(name, &params, checks, Artifact::Table { header: vec!["steps", "error"], rows }))
    };
    run().unwrap_or_else(|e| CaseOutput::failed(name, &params, e))
}

pub(super) fn jobs(cfg: &ConvergenceConfig) -> Vec<Job<'_>> {
    vec![
        Box::new(move || case(cfg, "rl-0.5-uniform", 0.5, 1.0, None)),
        Box::new(move || case(cfg, "rl-0.5-graded-4", 0.5, 4.0, Some(0.8))),
        Box::new(move || case(cfg, "rl-0.9-uniform", 0.9, 1.0, Some(0.7))),
    ]
}
