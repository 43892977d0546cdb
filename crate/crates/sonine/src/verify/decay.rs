use serde::{Deserialize, Serialize};
use serde_json::json;
use sonine_core::kernels::make_pair;
use sonine_core::pde::{decay_check, majorant_check, solve, Tolerances};
use sonine_core::spatial::build_operator;
use sonine_core::tstep::fit_loglog_slope;
use sonine_core::{Field, KernelPair, NonlinearSource, OperatorKind, ProblemSpec, SolveReport, SonineSpec, TimeGrid};

use super::{Artifact, CaseOutput, Check, Job};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub modes: usize,
    pub cells: usize,
    pub t_min: f64,
    pub tol_abs: f64,
    /// Fit window of `ln(1/U − 1)` against `ln t` for power kernels.
    pub power_window: [f64; 2],
    pub power_rel_tol: f64,
    /// Fit window of `ln U` against `ln t` for multi-term kernels.
    pub multi_term_window: [f64; 2],
    pub multi_term_rel_tol: f64,
    /// Times at which `(1 ∗ l)(t)/ln t` is sampled, and the band it must stay in.
    pub log_band_times: Vec<f64>,
    pub log_band: [f64; 2],
    /// Windows of the log-decrease rates of the tempered linear run.
    pub tempered_windows: Vec<[f64; 2]>,
    /// Every rate must be at least this fraction of their mean.
    pub tempered_min_rate_fraction: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            modes: 16,
            cells: 1000,
            t_min: 1e-4,
            tol_abs: 1e-3,
            power_window: [10.0, 100.0],
            power_rel_tol: 0.15,
            multi_term_window: [100.0, 1000.0],
            multi_term_rel_tol: 0.15,
            log_band_times: vec![10.0, 20.0, 50.0, 100.0],
            log_band: [0.5, 2.0],
            tempered_windows: vec![[2.0, 5.0], [5.0, 10.0], [10.0, 15.0], [15.0, 20.0]],
            tempered_min_rate_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Regime {
    Power { alpha: f64 },
    MultiTerm { alpha_min: f64 },
    Logarithmic,
    Exponential,
}

fn kernels() -> Vec<(&'static str, SonineSpec, f64, Regime)> {
    vec![
        ("rl-0.3", SonineSpec::RiemannLiouville { alpha: 0.3 }, 100.0, Regime::Power { alpha: 0.3 }),
        ("rl-0.5", SonineSpec::RiemannLiouville { alpha: 0.5 }, 100.0, Regime::Power { alpha: 0.5 }),
        ("rl-0.7", SonineSpec::RiemannLiouville { alpha: 0.7 }, 100.0, Regime::Power { alpha: 0.7 }),
        ("multi-term-0.8-0.4", SonineSpec::MultiTerm { alphas: vec![0.8, 0.4] }, 1000.0, Regime::MultiTerm { alpha_min: 0.4 }),
        ("distributed-order", SonineSpec::DistributedOrder, 100.0, Regime::Logarithmic),
        ("tempered-0.5-1", SonineSpec::Tempered { alpha: 0.5, mu: 1.0 }, 20.0, Regime::Exponential),
    ]
}

/// `‖u(t_n)‖/‖u₀‖`.
fn normalized(r: &SolveReport) -> Vec<f64> {
    r.l2_norms.iter().map(|n| n / r.u0_norm).collect()
}

/// Linear interpolation of `ln v` at `t`.
fn log_at(times: &[f64], values: &[f64], t: f64) -> Option<f64> {
    let i = times.partition_point(|&s| s < t);
    if i == 0 || i >= times.len() {
        return (i < times.len() && times[i] == t).then(|| values[i].ln());
    }
    let (t0, t1) = (times[i - 1], times[i]);
    let w = (t - t0) / (t1 - t0);
    Some((1.0 - w) * values[i - 1].ln() + w * values[i].ln())
}

fn regime_checks(cfg: &DecayConfig, regime: Regime, linear: bool, pair: &KernelPair, r: &SolveReport) -> sonine_core::Result<Vec<Check>> {
    let u = normalized(r);
    let mut checks = Vec::new();
    match regime {
        Regime::Power { alpha } => {
            let y: Vec<f64> = u.iter().map(|v| 1.0 / v - 1.0).collect();
            let slope = fit_loglog_slope(&r.times, &y, cfg.power_window[0], cfg.power_window[1])?;
            let ok = (slope - alpha).abs() <= cfg.power_rel_tol * alpha;
            checks.push(Check::new("decay-regime-power", slope, format!("slope of ln(1/U - 1) = {alpha} ± {:.0}%", 100.0 * cfg.power_rel_tol), ok));
        }
        Regime::MultiTerm { alpha_min } => {
            let slope = fit_loglog_slope(&r.times, &u, cfg.multi_term_window[0], cfg.multi_term_window[1])?;
            let ok = (slope + alpha_min).abs() <= cfg.multi_term_rel_tol * alpha_min;
            checks.push(Check::new("decay-regime-multi-term", slope, format!("slope of ln U = -{alpha_min} ± {:.0}%", 100.0 * cfg.multi_term_rel_tol), ok));
        }
        Regime::Logarithmic => {
            let mut worst: f64 = 0.0;
            for (&t, &v) in r.times.iter().zip(&u) {
                worst = worst.max(v * (1.0 + r.coercivity_constant * pair.cum_l(t)?));
            }
            checks.push(Check::new("decay-regime-log-bound", worst, "max U (1 + C_L (1*l)) <= 1 + 1e-3", worst <= 1.0 + 1e-3));
            let ratios: Vec<f64> = cfg
                .log_band_times
                .iter()
                .map(|&t| Ok(pair.cum_l(t)? / t.ln()))
                .collect::<sonine_core::Result<_>>()?;
            let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            let ok = lo >= cfg.log_band[0] && hi <= cfg.log_band[1];
            checks.push(Check::new("decay-regime-log-band", hi / lo, format!("(1*l)(t)/ln t in [{}, {}]", cfg.log_band[0], cfg.log_band[1]), ok));
        }
        Regime::Exponential if linear => {
            let mut rates = Vec::new();
            for w in &cfg.tempered_windows {
                let a = log_at(&r.times, &u, w[0]);
                let b = log_at(&r.times, &u, w[1]);
                if let (Some(a), Some(b)) = (a, b) {
                    rates.push((a - b) / (w[1] - w[0]));
                }
            }
            let mean = rates.iter().sum::<f64>() / rates.len().max(1) as f64;
            let min = rates.iter().copied().fold(f64::INFINITY, f64::min);
            let ok = rates.len() == cfg.tempered_windows.len()
                && min > 0.0
                && min >= cfg.tempered_min_rate_fraction * mean;
            checks.push(Check::new(
                "decay-regime-exponential",
                min,
                format!("every log-decrease rate > 0 and >= {} x mean ({mean:.4})", cfg.tempered_min_rate_fraction),
                ok,
            ));
        }
        Regime::Exponential => {}
    }
    Ok(checks)
}

pub(super) fn jobs(cfg: &DecayConfig) -> Vec<Job<'_>> {
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for (kname, spec, horizon, regime) in kernels() {
        for linear in [false, true] {
            let spec = spec.clone();
            jobs.push(Box::new(move || {
                let name = format!("{kname}-{}", if linear { "linear" } else { "fisher" });
                let params = json!({
                    "kernel": format!("{spec:?}"),
                    "source": if linear { "zero" } else { "FisherKPP" },
                    "modes": cfg.modes,
                    "T": horizon,
                    "cells": cfg.cells,
                    "t_min": cfg.t_min,
                    "initial": "sin(pi x)",
                });
                let run = || -> sonine_core::Result<CaseOutput> {
                    let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, cfg.modes)?;
                    let u0 = Field::sample(&op, |x| (std::f64::consts::PI * x).sin());
                    let source = if linear { NonlinearSource::custom("zero", |_| 0.0) } else { NonlinearSource::FisherKPP };
                    let pair = make_pair(spec.clone())?;
                    let problem = ProblemSpec {
                        pair: pair.clone(),
                        op,
                        source,
                        u0,
                        grid: TimeGrid::geometric(cfg.t_min, horizon, cfg.cells)?,
                        tolerances: Tolerances::default(),
                        keep_fields: false,
                    };
                    let r = solve(&problem)?;
                    if !r.is_completed() {
                        let c = Check::new("global-solution", *r.times.last().unwrap_or(&0.0), "Completed", false);
                        return Ok(CaseOutput::new(name.clone(), &params, vec![c], Artifact::Report(Box::new(r))));
                    }
                    let d = decay_check(&r, cfg.tol_abs)?;
                    let m = majorant_check(&r)?;
                    let mut checks = vec![
                        Check::new("decay-estimate", d.violations as f64, format!("0 violations at {}", cfg.tol_abs), d.violations == 0),
                        Check::new("majorant", m.max_gap_violation, "U - W <= 1e-3 at every node", m.pass),
                    ];
                    checks.extend(regime_checks(cfg, regime, linear, &pair, &r)?);
                    Ok(CaseOutput::new(name.clone(), &params, checks, Artifact::Report(Box::new(r))))
                };
                run().unwrap_or_else(|e| CaseOutput::failed(name.clone(), &params, e))
            }));
        }
    }
    jobs
}
