use serde::{Deserialize, Serialize};
use serde_json::json;
use sonine_core::kernels::make_pair;
use sonine_core::pde::{eigen_projection, initial_with_projection, solve, Phi1Normalization, Tolerances};
use sonine_core::spatial::build_operator;
use sonine_core::tstep::{bracket_blowup_closed_form, solve_scalar_nonlinear};
use sonine_core::{NonlinearSource, OperatorKind, ProblemSpec, SolveStatus, SonineSpec, TimeGrid, TraceStatus};

use super::{Artifact, CaseOutput, Check, Job};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct BlowupConfig {
    pub threshold: f64,
    pub dirac_horizon: f64,
    pub dirac_steps: usize,
    pub dirac_max_width: f64,
    pub scalar_alphas: Vec<f64>,
    /// Only brackets for these orders count toward the verdict.
    pub asserted_alphas: Vec<f64>,
    pub c0s: Vec<f64>,
    pub scalar_horizon: f64,
    pub scalar_steps: usize,
    /// Relative widening of the closed-form bracket.
    pub slack: f64,
    pub pde_modes: usize,
    pub pde_horizon: f64,
    pub pde_steps: usize,
    pub pde_c0: f64,
    pub bisection_range: [f64; 2],
    pub bisection_iterations: usize,
    pub bisection_steps: usize,
}

impl Default for BlowupConfig {
    fn default() -> Self {
        Self {
            threshold: 1e6,
            dirac_horizon: 2.0,
            dirac_steps: 4096,
            dirac_max_width: 1e-2,
            scalar_alphas: vec![0.4, 0.5, 0.6],
            asserted_alphas: vec![0.5],
            c0s: vec![4.0, 8.0],
            scalar_horizon: 1.0,
            scalar_steps: 2048,
            slack: 0.1,
            pde_modes: 32,
            pde_horizon: 1.0,
            pde_steps: 1024,
            pde_c0: 8.0,
            bisection_range: [0.1, 20.0],
            bisection_iterations: 12,
            bisection_steps: 256,
        }
    }
}

fn pde_problem(cfg: &BlowupConfig, c0: f64, steps: usize, keep_fields: bool) -> sonine_core::Result<ProblemSpec> {
    let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, cfg.pde_modes)?;
    let u0 = initial_with_projection(&op, c0)?;
    Ok(ProblemSpec {
        pair: make_pair(SonineSpec::RiemannLiouville { alpha: 0.5 })?,
        op,
        source: NonlinearSource::FisherKPP,
        u0,
        grid: TimeGrid::uniform(cfg.pde_horizon, steps)?,
        tolerances: Tolerances { blowup_threshold: cfg.threshold, ..Tolerances::default() },
        keep_fields,
    })
}

/// `true` when the PDE run with projection `c0` blows up before the horizon.
fn blows_up(cfg: &BlowupConfig, c0: f64, steps: usize) -> sonine_core::Result<bool> {
    let r = solve(&pde_problem(cfg, c0, steps, false)?)?;
    match r.status {
        SolveStatus::BlowUp { .. } => Ok(true),
        SolveStatus::Completed => Ok(false),
        SolveStatus::Failed { reason, at } => Err(sonine_core::Error::Numerical { what: reason, at }),
    }
}

/// Final bisection interval `[lo, hi]` with `lo` completing and `hi` blowing up.
fn bisect(cfg: &BlowupConfig, steps: usize) -> sonine_core::Result<Option<(f64, f64)>> {
    let [mut lo, mut hi] = cfg.bisection_range;
    if blows_up(cfg, lo, steps)? || !blows_up(cfg, hi, steps)? {
        return Ok(None);
    }
    for _ in 0..cfg.bisection_iterations {
        let mid = 0.5 * (lo + hi);
        if blows_up(cfg, mid, steps)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some((lo, hi)))
}

fn dirac_job(cfg: &BlowupConfig) -> CaseOutput {
    let name = "dirac-square";
    let params = json!({"kernel": "Dirac", "source": "y^2", "phi0": 1.0, "T": cfg.dirac_horizon, "steps": cfg.dirac_steps});
    let run = || -> sonine_core::Result<CaseOutput> {
        let pair = make_pair(SonineSpec::Dirac)?;
        let src = NonlinearSource::custom("square", |y| y * y);
        let grid = TimeGrid::uniform(cfg.dirac_horizon, cfg.dirac_steps)?;
        let tr = solve_scalar_nonlinear(&pair, 0.0, &src, 1.0, &grid, cfg.threshold)?;
        let checks = match tr.status {
            TraceStatus::BlowUp { t_low, t_high } => vec![
                Check::new("blowup-dirac-contains", t_low, format!("[{t_low}, {t_high}] contains 1"), t_low <= 1.0 && 1.0 <= t_high),
                Check::new("blowup-dirac-width", t_high - t_low, format!("width <= {}", cfg.dirac_max_width), t_high - t_low <= cfg.dirac_max_width),
            ],
            _ => vec![Check::new("blowup-dirac-contains", f64::NAN, "BlowUp", false)],
        };
        Ok(CaseOutput::new(name, &params, checks, Artifact::Trace(tr)))
    };
    run().unwrap_or_else(|e| CaseOutput::failed(name, &params, e))
}

fn scalar_job(cfg: &BlowupConfig, alpha: f64, c0: f64, lambda1: f64) -> CaseOutput {
    let name = if lambda1 > 0.0 {
        format!("scalar-rl-{alpha}-c{c0}")
    } else {
        format!("scalar-rl-{alpha}-c{c0}-no-damping")
    };
    let params = json!({
        "kernel": format!("RiemannLiouville {{ alpha: {alpha} }}"),
        "lambda1": lambda1,
        "c0": c0,
        "T": cfg.scalar_horizon,
        "steps": cfg.scalar_steps,
    });
    let run = || -> sonine_core::Result<CaseOutput> {
        let pair = make_pair(SonineSpec::RiemannLiouville { alpha })?;
        let grid = TimeGrid::uniform(cfg.scalar_horizon, cfg.scalar_steps)?;
        let tr = solve_scalar_nonlinear(&pair, lambda1, &NonlinearSource::FisherKPP, c0, &grid, cfg.threshold)?;
        let (lower, upper) = bracket_blowup_closed_form(alpha, c0)?;
        let (lo_w, hi_w) = (lower * (1.0 - cfg.slack), upper * (1.0 + cfg.slack));
        let expected = format!("bracket within [{lo_w:.6e}, {hi_w:.6e}]");
        let (measured, ok) = match tr.status {
            TraceStatus::BlowUp { t_low, t_high } => (0.5 * (t_low + t_high), t_low >= lo_w && t_high <= hi_w),
            _ => (f64::NAN, false),
        };
        let asserted = lambda1 > 0.0 && cfg.asserted_alphas.iter().any(|a| (a - alpha).abs() < 1e-12);
        let check = if asserted {
            Check::new("blowup-bracket", measured, expected, ok)
        } else {
            Check::info("blowup-bracket", measured, expected, ok)
        };
        let status = Check::info("blowup-status", tr.last(), "BlowUp", matches!(tr.status, TraceStatus::BlowUp { .. }));
        Ok(CaseOutput::new(name.clone(), &params, vec![check, status], Artifact::Trace(tr)))
    };
    run().unwrap_or_else(|e| CaseOutput::failed(name.clone(), &params, e))
}

fn pde_job(cfg: &BlowupConfig, c0: f64, asserted: bool) -> CaseOutput {
    let name = format!("pde-rl-0.5-c{c0}");
    let params = json!({"kernel": "RiemannLiouville { alpha: 0.5 }", "c0": c0, "modes": cfg.pde_modes, "T": cfg.pde_horizon, "steps": cfg.pde_steps});
    let run = || -> sonine_core::Result<CaseOutput> {
        let r = solve(&pde_problem(cfg, c0, cfg.pde_steps, true)?)?;
        let phi = eigen_projection(&r, Phi1Normalization::UnitIntegral)?;
        let last = phi.last().copied().unwrap_or(f64::NAN);
        let (measured, ok) = match r.status {
            SolveStatus::BlowUp { t_low, t_high } => (0.5 * (t_low + t_high), true),
            _ => (f64::NAN, false),
        };
        let status = if asserted {
            Check::new("blowup-pde", measured, "BlowUp", ok)
        } else {
            Check::info("blowup-pde", measured, "BlowUp", ok)
        };
        let grows = phi.windows(2).all(|w| w[1] >= w[0]) && last > c0;
        let proj = Check::info("blowup-projection-grows", last, format!("projection increasing beyond {c0}"), grows);
        Ok(CaseOutput::new(name.clone(), &params, vec![status, proj], Artifact::Report(Box::new(r))))
    };
    run().unwrap_or_else(|e| CaseOutput::failed(name.clone(), &params, e))
}

fn threshold_job(cfg: &BlowupConfig) -> CaseOutput {
    let name = "threshold-rl-0.5";
    let params = json!({
        "kernel": "RiemannLiouville { alpha: 0.5 }",
        "range": cfg.bisection_range,
        "iterations": cfg.bisection_iterations,
        "steps": cfg.bisection_steps,
        "T": cfg.pde_horizon,
        "modes": cfg.pde_modes,
    });
    let run = || -> sonine_core::Result<CaseOutput> {
        let cell = (cfg.bisection_range[1] - cfg.bisection_range[0]) / f64::powi(2.0, cfg.bisection_iterations as i32);
        let Some((lo, hi)) = bisect(cfg, cfg.bisection_steps)? else {
            let c = Check::new("blowup-threshold-monotone", f64::NAN, "range endpoints classified differently", false);
            return Ok(CaseOutput::new(name, &params, vec![c], Artifact::None));
        };
        let m_hat = 0.5 * (lo + hi);
        let probes = [cfg.bisection_range[0], 0.25 * m_hat, 0.5 * m_hat, 0.9 * m_hat, lo, hi, 1.1 * m_hat, 1.5 * m_hat, cfg.bisection_range[1]];
        let mut rows = Vec::new();
        let mut monotone = true;
        for &c in &probes {
            let b = blows_up(cfg, c, cfg.bisection_steps)?;
            monotone &= b == (c >= hi);
            rows.push(vec![c, if b { 1.0 } else { 0.0 }]);
        }
        let refined = bisect(cfg, 2 * cfg.bisection_steps)?;
        let m_fine = refined.map_or(f64::NAN, |(a, b)| 0.5 * (a + b));
        let stable = (m_fine - m_hat).abs() <= cell * (1.0 + 1e-9);
        let checks = vec![
            Check::new("blowup-threshold-monotone", m_hat, "blow-up exactly above the threshold", monotone),
            Check::new("blowup-threshold-stable", m_fine - m_hat, format!("|shift| <= {cell:.4e} under 2x refinement"), stable),
        ];
        Ok(CaseOutput::new(name, &params, checks, Artifact::Table { header: vec!["c0", "blows_up"], rows }))
    };
    run().unwrap_or_else(|e| CaseOutput::failed(name, &params, e))
}

pub(super) fn jobs(cfg: &BlowupConfig) -> Vec<Job<'_>> {
    let mut jobs: Vec<Job<'_>> = vec![Box::new(move || dirac_job(cfg))];
    for &alpha in &cfg.scalar_alphas {
        for &c0 in &cfg.c0s {
            jobs.push(Box::new(move || scalar_job(cfg, alpha, c0, std::f64::consts::PI * std::f64::consts::PI)));
            jobs.push(Box::new(move || scalar_job(cfg, alpha, c0, 0.0)));
        }
    }
    jobs.push(Box::new(move || pde_job(cfg, cfg.pde_c0, true)));
    jobs.push(Box::new(move || pde_job(cfg, 2.5 * cfg.pde_c0, false)));
    jobs.push(Box::new(move || threshold_job(cfg)));
    jobs
}
