use serde::{Deserialize, Serialize};
use serde_json::json;
use sonine_core::kernels::make_pair;
use sonine_core::tstep::{fit_loglog_slope, solve_power_decay, solve_scalar_volterra, ScalarOptions, Scheme};
use sonine_core::{SonineSpec, TimeGrid, TraceStatus};

use super::{Artifact, CaseOutput, Check, Job};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct QuasilinearConfig {
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub constant: f64,
    pub u0: f64,
    pub t_min: f64,
    pub horizon: f64,
    pub cells: usize,
    /// Fit window of `ln U` against `ln t`.
    pub window: [f64; 2],
    pub rel_tol: f64,
    /// Nonlinear scalar runs with non-power kernels.
    pub general_horizon: f64,
    pub general_steps: usize,
}

impl Default for QuasilinearConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.3, 0.5, 0.8],
            gammas: vec![1.0, 2.0, 3.0],
            constant: 1.0,
            u0: 1.0,
            t_min: 1e-6,
            horizon: 1e8,
            cells: 3000,
            window: [1e7, 1e8],
            rel_tol: 0.1,
            general_horizon: 20.0,
            general_steps: 2000,
        }
    }
}

fn power_job(cfg: &QuasilinearConfig, alpha: f64, gamma: f64) -> CaseOutput {
    let name = format!("power-{alpha}-gamma-{gamma}");
    let params = json!({
        "alpha": alpha, "gamma": gamma, "C": cfg.constant, "U0": cfg.u0,
        "t_min": cfg.t_min, "T": cfg.horizon, "cells": cfg.cells, "window": cfg.window,
    });
    let run = || -> sonine_core::Result<CaseOutput> {
        let grid = TimeGrid::geometric(cfg.t_min, cfg.horizon, cfg.cells)?;
        let tr = solve_power_decay(alpha, cfg.constant, gamma, cfg.u0, &grid)?;
        let target = -alpha / gamma;
        let slope = fit_loglog_slope(&tr.times, &tr.values, cfg.window[0], cfg.window[1])?;
        let ok = tr.status == TraceStatus::Completed && (slope - target).abs() <= cfg.rel_tol * target.abs();
        let positive = tr.values.iter().all(|v| *v > 0.0) && tr.values.windows(2).all(|w| w[1] <= w[0]);
        let checks = vec![
            Check::new("power-decay-slope", slope, format!("{target:.4} ± {:.0}%", 100.0 * cfg.rel_tol), ok),
            Check::new("power-decay-monotone", tr.last(), "positive and nonincreasing", positive),
        ];
        Ok(CaseOutput::new(name.clone(), &params, checks, Artifact::Trace(tr)))
    };
    run().unwrap_or_else(|e| CaseOutput::failed(name.clone(), &params, e))
}

fn general_job(cfg: &QuasilinearConfig, label: &'static str, spec: SonineSpec, gamma: f64) -> CaseOutput {
    let name = format!("{label}-gamma-{gamma}");
    let params = json!({
        "kernel": format!("{spec:?}"), "gamma": gamma, "C": cfg.constant, "U0": cfg.u0,
        "T": cfg.general_horizon, "steps": cfg.general_steps,
    });
    let run = || -> sonine_core::Result<CaseOutput> {
        let pair = make_pair(spec.clone())?;
        let grid = TimeGrid::uniform(cfg.general_horizon, cfg.general_steps)?;
        let c = cfg.constant;
        let g = move |x: f64| -c * x.max(0.0).powf(gamma);
        let opts = ScalarOptions { blowup_threshold: f64::INFINITY, ..ScalarOptions::default() };
        let tr = solve_scalar_volterra(&pair, cfg.u0, g, &grid, Scheme::Implicit, &opts)?;
        let ok = tr.status == TraceStatus::Completed
            && tr.values.iter().all(|v| *v > 0.0 && *v <= cfg.u0)
            && tr.values.windows(2).all(|w| w[1] <= w[0]);
        let check = Check::new("general-kernel-decay", tr.last(), "positive, bounded by U0, nonincreasing", ok);
        Ok(CaseOutput::new(name.clone(), &params, vec![check], Artifact::Trace(tr)))
    };
    run().unwrap_or_else(|e| CaseOutput::failed(name.clone(), &params, e))
}

pub(super) fn jobs(cfg: &QuasilinearConfig) -> Vec<Job<'_>> {
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for &alpha in &cfg.alphas {
        for &gamma in &cfg.gammas {
            jobs.push(Box::new(move || power_job(cfg, alpha, gamma)));
        }
    }
    for gamma in [2.0, 3.0] {
        jobs.push(Box::new(move || general_job(cfg, "tempered-0.5-1", SonineSpec::Tempered { alpha: 0.5, mu: 1.0 }, gamma)));
        jobs.push(Box::new(move || general_job(cfg, "distributed-order", SonineSpec::DistributedOrder, gamma)));
    }
    jobs
}
