use serde::{Deserialize, Serialize};
use serde_json::json;
use sonine_core::kernels::{make_pair, numeric_associate, verify_sonine};
use sonine_core::{SonineSpec, TimeGrid};

use super::{Artifact, CaseOutput, Check, Job};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SonineConfig {
    pub samples: Vec<f64>,
    pub tol: f64,
    /// Geometric table of the multi-term associate: first node, horizon, cells.
    pub multi_term_t_min: f64,
    pub multi_term_horizon: f64,
    pub multi_term_cells: usize,
}

impl Default for SonineConfig {
    fn default() -> Self {
        Self {
            samples: vec![0.1, 0.25, 0.5, 1.0, 2.0, 5.0],
            tol: 1e-6,
            multi_term_t_min: 1e-8,
            multi_term_horizon: 1e4,
            multi_term_cells: 4096,
        }
    }
}

pub(crate) fn closed_form() -> Vec<(&'static str, SonineSpec)> {
    vec![
        ("rl-0.3", SonineSpec::RiemannLiouville { alpha: 0.3 }),
        ("rl-0.7", SonineSpec::RiemannLiouville { alpha: 0.7 }),
        ("tempered-0.5-1", SonineSpec::Tempered { alpha: 0.5, mu: 1.0 }),
        ("bessel-0.4", SonineSpec::BesselPair { alpha: 0.4 }),
        ("mittag-leffler-0.3-0.7", SonineSpec::MittagLefflerPair { alpha: 0.3, beta: 0.7 }),
        ("distributed-order", SonineSpec::DistributedOrder),
    ]
}

pub(super) fn jobs(cfg: &SonineConfig) -> Vec<Job<'_>> {
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for (name, spec) in closed_form() {
        jobs.push(Box::new(move || {
            let params = json!({"kernel": format!("{spec:?}"), "samples": cfg.samples, "tol": cfg.tol});
            let run = || -> sonine_core::Result<CaseOutput> {
                let pair = make_pair(spec.clone())?;
                let r = verify_sonine(&pair, &cfg.samples, cfg.tol)?;
                let check = Check::new("sonine-identity", r.max_deviation, format!("max |k*l - 1| <= {}", cfg.tol), r.pass);
                let rows = r.samples.iter().map(|&(t, v)| vec![t, v, v - 1.0]).collect();
                let table = Artifact::Table { header: vec!["t", "k_conv_l", "deviation"], rows };
                Ok(CaseOutput::new(name, &params, vec![check], table))
            };
            run().unwrap_or_else(|e| CaseOutput::failed(name, &params, e))
        }));
    }
    jobs.push(Box::new(move || {
        let name = "multi-term-0.8-0.4";
        let spec = SonineSpec::MultiTerm { alphas: vec![0.8, 0.4] };
        let params = json!({
            "kernel": format!("{spec:?}"),
            "t_min": cfg.multi_term_t_min,
            "horizon": cfg.multi_term_horizon,
            "cells": cfg.multi_term_cells,
            "tol": cfg.tol,
        });
        let run = || -> sonine_core::Result<CaseOutput> {
            let grid = TimeGrid::geometric(cfg.multi_term_t_min, cfg.multi_term_horizon, cfg.multi_term_cells)?;
            let sol = numeric_associate(&spec, &grid)?;
            let check = Check::new(
                "sonine-identity",
                sol.node_residual,
                format!("node residual <= {}", cfg.tol),
                sol.node_residual <= cfg.tol,
            );
            let rows = sol.midpoints.iter().zip(&sol.values).map(|(&t, &l)| vec![t, l]).collect();
            Ok(CaseOutput::new(name, &params, vec![check], Artifact::Table { header: vec!["t_mid", "l"], rows }))
        };
        run().unwrap_or_else(|e| CaseOutput::failed(name, &params, e))
    }));
    jobs
}
