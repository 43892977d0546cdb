use serde::{Deserialize, Serialize};
use serde_json::json;
use sonine_core::kernels::make_pair;
use sonine_core::pde::{decay_check, majorant_check, solve, Tolerances};
use sonine_core::spatial::build_operator;
use sonine_core::{Field, NonlinearSource, OperatorKind, ProblemSpec, SonineSpec, TimeGrid};

use super::{range_excess, Artifact, CaseOutput, Check, Job};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct InvarianceConfig {
    pub modes: usize,
    pub horizon: f64,
    pub steps: usize,
    pub tol: f64,
}

impl Default for InvarianceConfig {
    fn default() -> Self {
        Self { modes: 32, horizon: 2.0, steps: 2048, tol: 1e-6 }
    }
}

pub(crate) fn kernels() -> Vec<(&'static str, SonineSpec)> {
    vec![
        ("rl-0.3", SonineSpec::RiemannLiouville { alpha: 0.3 }),
        ("rl-0.7", SonineSpec::RiemannLiouville { alpha: 0.7 }),
        ("tempered-0.5-1", SonineSpec::Tempered { alpha: 0.5, mu: 1.0 }),
        ("distributed-order", SonineSpec::DistributedOrder),
        ("mittag-leffler-0.3-0.7", SonineSpec::MittagLefflerPair { alpha: 0.3, beta: 0.7 }),
    ]
}

fn sources() -> Vec<(&'static str, NonlinearSource)> {
    vec![
        ("fisher", NonlinearSource::FisherKPP),
        ("logarithmic", NonlinearSource::Logarithmic),
        ("tanh-shift", NonlinearSource::TanhShift),
    ]
}

fn operators() -> Vec<(&'static str, OperatorKind)> {
    vec![
        ("dirichlet", OperatorKind::DirichletLaplacian { length: 1.0 }),
        ("involution-0.5", OperatorKind::Involution { epsilon: 0.5 }),
    ]
}

pub(super) fn jobs(cfg: &InvarianceConfig) -> Vec<Job<'_>> {
    let mut jobs: Vec<Job<'_>> = Vec::new();
    for (kname, spec) in kernels() {
        for (sname, source) in sources() {
            for (oname, kind) in operators() {
                let spec = spec.clone();
                let source = source.clone();
                jobs.push(Box::new(move || {
                    let name = format!("{kname}-{sname}-{oname}");
                    let params = json!({
                        "kernel": format!("{spec:?}"),
                        "source": source.name(),
                        "operator": format!("{kind:?}"),
                        "modes": cfg.modes,
                        "T": cfg.horizon,
                        "steps": cfg.steps,
                        "initial": "sin(pi x)",
                    });
                    let run = || -> sonine_core::Result<CaseOutput> {
                        let op = build_operator(kind, cfg.modes)?;
                        let u0 = Field::sample(&op, |x| (std::f64::consts::PI * x).sin());
                        let problem = ProblemSpec {
                            pair: make_pair(spec.clone())?,
                            op,
                            source: source.clone(),
                            u0,
                            grid: TimeGrid::uniform(cfg.horizon, cfg.steps)?,
                            tolerances: Tolerances::default(),
                            keep_fields: false,
                        };
                        let r = solve(&problem)?;
                        let mut checks = vec![Check::new("global-solution", r.times.len() as f64 - 1.0, "Completed", r.is_completed())];
                        let excess = range_excess(&r);
                        checks.push(Check::new("range-invariance", excess, format!("range excess <= {}", cfg.tol), excess <= cfg.tol && r.is_completed()));
                        if r.is_completed() {
                            let d = decay_check(&r, 1e-3)?;
                            checks.push(Check::info("decay-estimate", d.max_excess, "max excess <= 1e-3", d.violations == 0));
                            let m = majorant_check(&r)?;
                            checks.push(Check::info("majorant", m.max_gap_violation, "U - W <= 1e-3", m.pass));
                        }
                        Ok(CaseOutput::new(name.clone(), &params, checks, Artifact::Report(Box::new(r))))
                    };
                    run().unwrap_or_else(|e| CaseOutput::failed(name.clone(), &params, e))
                }));
            }
        }
    }
    jobs
}
