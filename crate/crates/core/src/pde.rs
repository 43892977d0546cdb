//! Spectral-in-space, product-integration-in-time solver for
//! `∂ₜ(k ∗ (u − u₀)) + L u = f(u)` with Dirichlet data.
//!
//! Each mode obeys the Volterra equation `u_k = u₀_k + l ∗ (F_k(u) − λ_k u_k)`,
//! where `F = f(u)` is formed pseudospectrally on the oversampled nodes. A step
//! solves `(1 + wλ_k) u_k = H_k + w F_k(u)` by Picard iteration, `w` being the
//! weight of the newest cell and `H` the accumulated history.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::KernelPair;
use crate::nonlin::NonlinearSource;
use crate::spatial::{to_modal, Field, SpectralOperator};
use crate::tstep::{build_weights, linear_majorant_with_weights, ConvolutionWeights, TimeGrid};

/// Iteration and detection controls of [`solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Picard stopping tolerance on the L² update, relative to `max(1, ‖u‖)`.
    pub fixed_point_tol: f64,
    pub max_iters: usize,
    pub blowup_threshold: f64,
    /// Smallest cell, relative to its end time, produced by refinement.
    pub min_rel_width: f64,
    /// Number of pieces a refined cell is cut into.
    pub subdivisions: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fixed_point_tol: 1e-10,
            max_iters: 100,
            blowup_threshold: 1e6,
            min_rel_width: 1e-3,
            subdivisions: 8,
        }
    }
}

/// A complete problem description.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub pair: KernelPair,
    pub op: SpectralOperator,
    pub source: NonlinearSource,
    pub u0: Field,
    pub grid: TimeGrid,
    pub tolerances: Tolerances,
    /// Retain the modal solution at every node (needed by [`eigen_projection`]).
    pub keep_fields: bool,
}

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveStatus {
    Completed,
    /// The nodal maximum left every bounded set between the two times.
    BlowUp { t_low: f64, t_high: f64 },
    Failed { reason: &'static str, at: f64 },
}

/// Per-node diagnostics of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Nodes actually used (the grid, plus any refinement before a blow-up).
    pub times: Vec<f64>,
    pub l2_norms: Vec<f64>,
    pub range_min: Vec<f64>,
    pub range_max: Vec<f64>,
    /// `‖u₀‖ / (1 + C_L (1 ∗ l)(t_n))`.
    pub decay_bound: Vec<f64>,
    /// Solution of `W + C_L (l ∗ W) = 1` on the same nodes.
    pub majorant_w: Vec<f64>,
    pub status: SolveStatus,
    pub u0_norm: f64,
    pub coercivity_constant: f64,
    /// Modal coefficients per node when requested.
    pub fields: Option<Vec<Vec<f64>>>,
    /// Position of the wavenumber-1 mode in the operator's ordering.
    pub first_mode_index: Option<usize>,
    pub length: f64,
}

impl SolveReport {
    pub fn is_completed(&self) -> bool {
        matches!(self.status, SolveStatus::Completed)
    }
}

struct Workspace {
    nodal: Vec<f64>,
    fvals: Vec<f64>,
    fmodal: Vec<f64>,
}

impl Workspace {
    /// `F = P f(u)`; returns the nodal extrema of `u`.
    fn source_modal(&mut self, op: &SpectralOperator, source: &NonlinearSource, u: &[f64]) -> (f64, f64) {
        op.synthesize(u, &mut self.nodal);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (fv, &x) in self.fvals.iter_mut().zip(&self.nodal) {
            lo = lo.min(x);
            hi = hi.max(x);
            *fv = source.eval(x);
        }
        op.analyze(&self.fvals, &mut self.fmodal);
        (lo, hi)
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

enum StepOutcome {
    Accepted { u: Vec<f64>, f: Vec<f64>, lo: f64, hi: f64 },
    TooLarge,
    NoConvergence,
}

/// Runs the solver over `spec.grid`.
pub fn solve(spec: &ProblemSpec) -> Result<SolveReport> {
    let op = &spec.op;
    let n_modes = op.n_modes();
    let tol = spec.tolerances;
    if !(tol.fixed_point_tol > 0.0) || tol.max_iters == 0 || !(tol.blowup_threshold > 0.0) {
        return Err(Error::InvalidParameter { what: "tolerances", value: tol.fixed_point_tol });
    }
    if spec.grid.horizon() > spec.pair.horizon() {
        return Err(Error::Range { what: "grid beyond the kernel horizon", value: spec.grid.horizon() });
    }
    let u0 = to_modal(&spec.u0, op)?;
    let u0m: Vec<f64> = u0.modal().expect("modal").to_vec();
    if u0m.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter { what: "non-finite initial data", value: f64::NAN });
    }
    let lam = op.eigenvalues();
    let mut ws = Workspace {
        nodal: vec![0.0; op.n_nodes()],
        fvals: vec![0.0; op.n_nodes()],
        fmodal: vec![0.0; n_modes],
    };

    // Uniform grids reuse one lag vector until a refinement breaks the pattern.
    let base: Option<ConvolutionWeights> =
        if spec.grid.is_uniform() { Some(build_weights(&spec.pair, &spec.grid)?) } else { None };
    let mut on_grid = true;

    let mut times = vec![0.0];
    let (lo0, hi0) = ws.source_modal(op, &spec.source, &u0m);
    let mut range_min = vec![lo0];
    let mut range_max = vec![hi0];
    let mut l2_norms = vec![l2(&u0m)];
    let mut last_u = u0m.clone();
    // G_j = F(u_j) - Λu_j for accepted nodes j ≥ 1, flattened
    let mut history: Vec<f64> = Vec::new();
    let mut fields = spec.keep_fields.then(|| vec![u0m.clone()]);

    let mut pending: Vec<f64> = spec.grid.nodes()[1..].iter().rev().copied().collect();
    let mut row = Vec::new();
    let mut work = Vec::new();
    let mut hist = vec![0.0; n_modes];
    let mut status = SolveStatus::Completed;

    while let Some(tn) = pending.pop() {
        let n = times.len();
        match (&base, on_grid) {
            (Some(w), true) => w.row_into(n, &mut row),
            _ => {
                work.clear();
                work.extend_from_slice(&times);
                work.push(tn);
                crate::tstep::row_weights(&spec.pair, &work, &mut row)?;
            }
        }
        hist.copy_from_slice(&u0m);
        for j in 0..n - 1 {
            let wj = row[j];
            let g = &history[j * n_modes..(j + 1) * n_modes];
            for (h, gv) in hist.iter_mut().zip(g) {
                *h += wj * gv;
            }
        }
        let w = row[n - 1];
        let outcome = picard(op, &spec.source, &mut ws, &hist, w, lam, &last_u, &tol);
        let t_prev = times[n - 1];
        let prev_max = range_max[n - 1].abs().max(range_min[n - 1].abs());
        let refine = match &outcome {
            StepOutcome::Accepted { lo, hi, .. } => {
                let peak = lo.abs().max(hi.abs());
                peak > 1.0 && peak > 1.5 * prev_max.max(1.0)
            }
            _ => true,
        };
        if refine && tn - t_prev > tol.min_rel_width * tn {
            on_grid = false;
            pending.push(tn);
            let m = tol.subdivisions.max(2);
            let width = tn - t_prev;
            for i in (1..m).rev() {
                pending.push(t_prev + width * (i as f64 / m as f64));
            }
            continue;
        }
        match outcome {
            StepOutcome::Accepted { u, f, lo, hi } => {
                for k in 0..n_modes {
                    history.push(f[k] - lam[k] * u[k]);
                }
                times.push(tn);
                l2_norms.push(l2(&u));
                range_min.push(lo);
                range_max.push(hi);
                if let Some(fs) = fields.as_mut() {
                    fs.push(u.clone());
                }
                last_u = u;
            }
            StepOutcome::TooLarge => {
                status = SolveStatus::BlowUp { t_low: t_prev, t_high: tn };
                break;
            }
            StepOutcome::NoConvergence => {
                let growing = n >= 2 && l2_norms[n - 1] > l2_norms[n - 2] && range_max[n - 1] > 1.0;
                status = if growing {
                    SolveStatus::BlowUp { t_low: t_prev, t_high: tn }
                } else {
                    SolveStatus::Failed { reason: "fixed-point iteration did not converge", at: tn }
                };
                break;
            }
        }
    }

    let c_l = op.coercivity_constant();
    let u0_norm = l2_norms[0];
    let decay_bound = times
        .iter()
        .map(|&t| Ok(u0_norm / (1.0 + c_l * spec.pair.cum_l(t)?)))
        .collect::<Result<Vec<f64>>>()?;
    let weights = match (&base, on_grid && times.len() == spec.grid.nodes().len()) {
        (Some(w), true) => w.clone(),
        _ => build_weights(&spec.pair, &TimeGrid::from_nodes(times.clone())?)?,
    };
    let majorant_w = linear_majorant_with_weights(c_l, &weights, &times).values;

    Ok(SolveReport {
        times,
        l2_norms,
        range_min,
        range_max,
        decay_bound,
        majorant_w,
        status,
        u0_norm,
        coercivity_constant: c_l,
        fields,
        first_mode_index: op.index_of_wavenumber(1),
        length: op.length(),
    })
}

#[allow(clippy::too_many_arguments)]
fn picard(
    op: &SpectralOperator,
    source: &NonlinearSource,
    ws: &mut Workspace,
    hist: &[f64],
    w: f64,
    lam: &[f64],
    start: &[f64],
    tol: &Tolerances,
) -> StepOutcome {
    let mut u = start.to_vec();
    let mut next = vec![0.0; u.len()];
    for _ in 0..tol.max_iters {
        let (lo, hi) = ws.source_modal(op, source, &u);
        if !(lo.abs().max(hi.abs()) <= tol.blowup_threshold) {
            return StepOutcome::TooLarge;
        }
        let mut diff2 = 0.0;
        for k in 0..u.len() {
            next[k] = (hist[k] + w * ws.fmodal[k]) / (1.0 + w * lam[k]);
            diff2 += (next[k] - u[k]) * (next[k] - u[k]);
        }
        core::mem::swap(&mut u, &mut next);
        if !diff2.is_finite() {
            return StepOutcome::NoConvergence;
        }
        if diff2.sqrt() <= tol.fixed_point_tol * l2(&u).max(1.0) {
            let (lo, hi) = ws.source_modal(op, source, &u);
            if !(lo.abs().max(hi.abs()) <= tol.blowup_threshold) {
                return StepOutcome::TooLarge;
            }
            return StepOutcome::Accepted { u, f: ws.fmodal.clone(), lo, hi };
        }
    }
    StepOutcome::NoConvergence
}

/// Result of [`decay_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCheck {
    pub violations: usize,
    /// `max_n (‖u(t_n)‖ − bound_n)`, possibly negative.
    pub max_excess: f64,
    /// The check is vacuous because `‖u₀‖ = 0`.
    pub skipped: bool,
}

/// Counts nodes where `‖u(t_n)‖ > ‖u₀‖/(1 + C_L(1 ∗ l)(t_n)) + tol_abs`.
pub fn decay_check(report: &SolveReport, tol_abs: f64) -> Result<DecayCheck> {
    if !report.is_completed() {
        return Err(Error::Precondition { what: "decay check needs a completed solve", at: 0.0 });
    }
    if report.u0_norm == 0.0 {
        return Ok(DecayCheck { violations: 0, max_excess: 0.0, skipped: true });
    }
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for (n, b) in report.l2_norms.iter().zip(&report.decay_bound) {
        let e = n - b;
        max_excess = max_excess.max(e);
        if e > tol_abs {
            violations += 1;
        }
    }
    Ok(DecayCheck { violations, max_excess, skipped: false })
}

/// Result of [`majorant_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantCheck {
    pub pass: bool,
    /// `max_n (‖u(t_n)‖/‖u₀‖ − W_n)`.
    pub max_gap_violation: f64,
}

/// Checks `‖u(t_n)‖/‖u₀‖ ≤ W_n + 1e-3` at every node.
pub fn majorant_check(report: &SolveReport) -> Result<MajorantCheck> {
    if !(report.u0_norm > 0.0) {
        return Err(Error::Degenerate("zero initial data in majorant check"));
    }
    let mut worst = f64::NEG_INFINITY;
    for (n, w) in report.l2_norms.iter().zip(&report.majorant_w) {
        worst = worst.max(n / report.u0_norm - w);
    }
    Ok(MajorantCheck { pass: worst <= 1e-3, max_gap_violation: worst })
}

/// Normalization of the positive eigenfunction `φ₁ ∝ sin(πx/ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phi1Normalization {
    /// `∫φ₁² = 1`.
    Orthonormal,
    /// `∫φ₁ = 1`.
    UnitIntegral,
}

/// `∫₀^ℓ φ₁` of the orthonormal first sine mode: `√(2/ℓ)·2ℓ/π`.
pub fn orthonormal_phi1_integral(length: f64) -> f64 {
    (2.0 / length).sqrt() * 2.0 * length / PI
}

/// `Φ(t_n) = ∫ u(t_n) φ₁ dx` at every retained node.
pub fn eigen_projection(report: &SolveReport, normalization: Phi1Normalization) -> Result<Vec<f64>> {
    let fields = report.fields.as_ref().ok_or(Error::Unavailable("retained solution fields"))?;
    let idx = report.first_mode_index.ok_or(Error::Unavailable("first sine mode"))?;
    let scale = match normalization {
        Phi1Normalization::Orthonormal => 1.0,
        Phi1Normalization::UnitIntegral => 1.0 / orthonormal_phi1_integral(report.length),
    };
    Ok(fields.iter().map(|u| u[idx] * scale).collect())
}

/// `u₀ = c φ₁` (orthonormal `φ₁`) with `∫u₀ φ̃₁ = c0` for the unit-integral `φ̃₁`.
pub fn initial_with_projection(op: &SpectralOperator, c0: f64) -> Result<Field> {
    let idx = op.index_of_wavenumber(1).ok_or(Error::Unavailable("first sine mode"))?;
    Ok(Field::eigenmode(op, idx, c0 * orthonormal_phi1_integral(op.length())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::SonineSpec;
    use crate::spatial::{build_operator, OperatorKind};

    fn spec_with(u0: Field, source: NonlinearSource) -> ProblemSpec {
        let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, 8).unwrap();
        ProblemSpec {
            pair: KernelPair::new(SonineSpec::RiemannLiouville { alpha: 0.5 }).unwrap(),
            op,
            source,
            u0,
            grid: TimeGrid::uniform(1.0, 64).unwrap(),
            tolerances: Tolerances::default(),
            keep_fields: true,
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, 8).unwrap();
        let spec = spec_with(Field::zeros(&op), NonlinearSource::FisherKPP);
        let r = solve(&spec).unwrap();
        assert!(r.l2_norms.iter().all(|&v| v == 0.0));
        assert!(decay_check(&r, 1e-3).unwrap().skipped);
    }

    #[test]
    fn projection_of_modes() {
        let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, 8).unwrap();
        let zero = NonlinearSource::custom("zero", |_| 0.0);
        let mut spec = spec_with(Field::eigenmode(&op, 1, 1.0), zero);
        spec.grid = TimeGrid::uniform(0.1, 4).unwrap();
        let r = solve(&spec).unwrap();
        let phi = eigen_projection(&r, Phi1Normalization::Orthonormal).unwrap();
        assert!(phi.iter().all(|&v| v == 0.0));
        let c = initial_with_projection(&op, 8.0).unwrap();
        let coef = c.modal().unwrap()[0];
        assert!((coef / orthonormal_phi1_integral(1.0) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn projection_needs_fields() {
        let op = build_operator(OperatorKind::DirichletLaplacian { length: 1.0 }, 8).unwrap();
        let mut spec = spec_with(Field::eigenmode(&op, 0, 1.0), NonlinearSource::FisherKPP);
        spec.keep_fields = false;
        spec.grid = TimeGrid::uniform(0.1, 4).unwrap();
        let r = solve(&spec).unwrap();
        assert!(matches!(eigen_projection(&r, Phi1Normalization::Orthonormal), Err(Error::Unavailable(_))));
    }
}
