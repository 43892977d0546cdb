//! Time grids, product-integration weights and scalar Volterra solvers.
//!
//! All solvers discretize the Volterra form
//!
//! ```text
//! Φ(t) = Φ₀ + ∫₀ᵗ l(t - s) G(Φ(s)) ds
//! ```
//!
//! with `G` piecewise constant on each cell `[t_j, t_{j+1}]`. The weight of
//! cell `j` seen from node `t_n` is
//! `w_{n,j} = L(t_n - t_j) - L(t_n - t_{j+1})`, `L = 1 ∗ l`, so every row sums
//! to `L(t_n)` by telescoping. The implicit scheme samples `G` at the right end
//! of each cell, the explicit one at the left end.

use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::{KernelPair, SonineSpec};
use crate::nonlin::NonlinearSource;
use crate::specfun::gamma;

/// Node distribution of a [`TimeGrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mesh {
    /// `t_j = T j / N`.
    Uniform,
    /// `t_j = T (j/N)^r`, `r ≥ 1`.
    Graded { r: f64 },
    /// `t_0 = 0`, then `t_j = t_min q^{j-1}` up to `T`.
    Geometric { t_min: f64 },
    /// Arbitrary increasing nodes.
    Custom,
}

/// Strictly increasing time nodes starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    mesh: Mesh,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(horizon: f64, n_steps: usize, mesh: Mesh) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidParameter { what: "horizon", value: horizon });
        }
        if n_steps == 0 {
            return Err(Error::InvalidParameter { what: "n_steps", value: 0.0 });
        }
        let n = n_steps as f64;
        let nodes: Vec<f64> = match mesh {
            Mesh::Uniform => (0..=n_steps).map(|j| horizon * (j as f64 / n)).collect(),
            Mesh::Graded { r } => {
                if !(r >= 1.0) || !r.is_finite() {
                    return Err(Error::InvalidParameter { what: "grading exponent", value: r });
                }
                (0..=n_steps).map(|j| horizon * (j as f64 / n).powf(r)).collect()
            }
            Mesh::Geometric { t_min } => {
                if !(t_min > 0.0 && t_min < horizon) || n_steps < 2 {
                    return Err(Error::InvalidParameter { what: "geometric t_min", value: t_min });
                }
                let ratio = (horizon / t_min).ln() / (n - 1.0);
                let mut v = Vec::with_capacity(n_steps + 1);
                v.push(0.0);
                for j in 0..n_steps {
                    v.push(t_min * (ratio * j as f64).exp());
                }
                v
            }
            Mesh::Custom => {
                return Err(Error::InvalidParameter { what: "custom mesh (use from_nodes)", value: 0.0 })
            }
        };
        let mut grid = Self { mesh, nodes };
        // pin the horizon exactly
        *grid.nodes.last_mut().expect("nonempty") = horizon;
        grid.validate()?;
        Ok(grid)
    }

    pub fn uniform(horizon: f64, n_steps: usize) -> Result<Self> {
        Self::new(horizon, n_steps, Mesh::Uniform)
    }

    pub fn graded(horizon: f64, n_steps: usize, r: f64) -> Result<Self> {
        Self::new(horizon, n_steps, Mesh::Graded { r })
    }

    /// A first cell `[0, t_min]` followed by `cells - 1` cells of equal ratio up to `horizon`.
    pub fn geometric(t_min: f64, horizon: f64, cells: usize) -> Result<Self> {
        Self::new(horizon, cells, Mesh::Geometric { t_min })
    }

    /// Grid with caller-supplied nodes; they must start at 0 and increase strictly.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let grid = Self { mesh: Mesh::Custom, nodes };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if self.nodes.len() < 2 || self.nodes[0] != 0.0 {
            return Err(Error::InvalidParameter { what: "grid must start at 0", value: 0.0 });
        }
        for w in self.nodes.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidParameter { what: "grid nodes not increasing", value: w[1] });
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.mesh, Mesh::Uniform)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum WeightStore {
    /// `lag[m - 1]` is the weight of a cell `m` steps back.
    Toeplitz(Vec<f64>),
    /// Row `n` (1-based) occupies `[n(n-1)/2, n(n+1)/2)`.
    Triangular(Vec<f64>),
}

/// Product-integration weights `w_{n,j}`, `0 ≤ j < n ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionWeights {
    n_steps: usize,
    store: WeightStore,
    row_sums: Vec<f64>,
}

impl ConvolutionWeights {
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Weight of cell `j` seen from node `n`.
    pub fn weight(&self, n: usize, j: usize) -> f64 {
        debug_assert!(j < n && n <= self.n_steps);
        match &self.store {
            WeightStore::Toeplitz(lag) => lag[n - j - 1],
            WeightStore::Triangular(w) => w[n * (n - 1) / 2 + j],
        }
    }

    /// Writes row `n` (cells `0..n`) into `out`.
    pub fn row_into(&self, n: usize, out: &mut Vec<f64>) {
        out.clear();
        match &self.store {
            WeightStore::Toeplitz(lag) => out.extend((0..n).map(|j| lag[n - j - 1])),
            WeightStore::Triangular(w) => {
                let start = n * (n - 1) / 2;
                out.extend_from_slice(&w[start..start + n]);
            }
        }
    }

    /// `L(t_n)`, the value every row sums to.
    pub fn cum_l_at(&self, n: usize) -> f64 {
        self.row_sums[n]
    }

    /// `max_n |Σ_j w_{n,j} - L(t_n)|`.
    pub fn max_telescoping_error(&self) -> f64 {
        let mut row = Vec::new();
        let mut worst: f64 = 0.0;
        for n in 1..=self.n_steps {
            self.row_into(n, &mut row);
            let s: f64 = row.iter().sum();
            worst = worst.max((s - self.row_sums[n]).abs());
        }
        worst
    }

    pub fn min_weight(&self) -> f64 {
        match &self.store {
            WeightStore::Toeplitz(v) | WeightStore::Triangular(v) => {
                v.iter().copied().fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Weights `w_{n,j}` of `l` on `grid`, from exact differences of `1 ∗ l`.
///
/// Uniform grids share one lag vector; other grids store the full triangle.
pub fn build_weights(pair: &KernelPair, grid: &TimeGrid) -> Result<ConvolutionWeights> {
    let nodes = grid.nodes();
    let n_steps = grid.n_steps();
    if grid.horizon() > pair.horizon() {
        return Err(Error::Range { what: "grid beyond the kernel horizon", value: grid.horizon() });
    }
    let row_sums: Vec<f64> = nodes.iter().map(|&t| pair.cum_l(t)).collect::<Result<_>>()?;
    let store = if grid.is_uniform() {
        let h = nodes[1];
        let mut lag = Vec::with_capacity(n_steps);
        if pair.is_dirac() {
            lag.resize(n_steps, h);
        } else {
            let mut prev = 0.0;
            for m in 1..=n_steps {
                let cur = pair.cum_l(m as f64 * h)?;
                lag.push(cur - prev);
                prev = cur;
            }
        }
        WeightStore::Toeplitz(lag)
    } else {
        let mut w = Vec::with_capacity(n_steps * (n_steps + 1) / 2);
        let mut row = Vec::with_capacity(n_steps);
        for n in 1..=n_steps {
            row_weights(pair, &nodes[..=n], &mut row)?;
            w.extend_from_slice(&row);
        }
        WeightStore::Triangular(w)
    };
    let weights = ConvolutionWeights { n_steps, store, row_sums };
    if weights.min_weight() < 0.0 {
        return Err(Error::Numerical { what: "negative convolution weight", at: weights.min_weight() });
    }
    Ok(weights)
}

/// Weights of all cells of `nodes` seen from its last node.
pub(crate) fn row_weights(pair: &KernelPair, nodes: &[f64], out: &mut Vec<f64>) -> Result<()> {
    out.clear();
    let n = nodes.len() - 1;
    let tn = nodes[n];
    if pair.is_dirac() {
        out.extend(nodes.windows(2).map(|w| w[1] - w[0]));
        return Ok(());
    }
    let mut upper = pair.cum_l(tn - nodes[0])?;
    for j in 0..n {
        let lower = if j + 1 == n { 0.0 } else { pair.cum_l(tn - nodes[j + 1])? };
        out.push(upper - lower);
        upper = lower;
    }
    Ok(())
}

/// Outcome of a scalar solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceStatus {
    Completed,
    /// The solution left every bounded set between `t_low` and `t_high`.
    BlowUp { t_low: f64, t_high: f64 },
    Failed { reason: &'static str, at: f64 },
}

/// Values of a scalar solve at the (possibly refined) nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTrace {
    /// Nodes actually used; refinement near a blow-up inserts extra nodes.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub status: TraceStatus,
}

impl ScalarTrace {
    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Linear interpolation of the trace at `t` inside the computed range.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let i = self.times.partition_point(|&x| x < t);
        if i == 0 {
            return (t == self.times[0]).then(|| self.values[0]);
        }
        if i == self.times.len() {
            return None;
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let s = (t - t0) / (t1 - t0);
        Some(self.values[i - 1] + s * (self.values[i] - self.values[i - 1]))
    }
}

/// `W + C (l ∗ W) = 1` on `grid` (implicit, right-endpoint cells).
pub fn solve_linear_majorant(c: f64, pair: &KernelPair, grid: &TimeGrid) -> Result<ScalarTrace> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter { what: "majorant constant", value: c });
    }
    let weights = build_weights(pair, grid)?;
    Ok(linear_majorant_with_weights(c, &weights, grid.nodes()))
}

/// [`solve_linear_majorant`] with precomputed weights.
pub fn linear_majorant_with_weights(c: f64, weights: &ConvolutionWeights, nodes: &[f64]) -> ScalarTrace {
    let n_steps = weights.n_steps();
    let mut values = Vec::with_capacity(n_steps + 1);
    values.push(1.0);
    let mut row = Vec::with_capacity(n_steps);
    for n in 1..=n_steps {
        weights.row_into(n, &mut row);
        let mut hist = 0.0;
        for j in 0..n - 1 {
            hist += row[j] * values[j + 1];
        }
        values.push((1.0 - c * hist) / (1.0 + c * row[n - 1]));
    }
    ScalarTrace { times: nodes.to_vec(), values, status: TraceStatus::Completed }
}

/// Which end of each cell carries the sample of `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Right end; the newest cell is solved implicitly.
    Implicit,
    /// Left end; fully explicit.
    Explicit,
}

/// Controls of the scalar nonlinear solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarOptions {
    pub blowup_threshold: f64,
    /// Smallest cell, relative to its end time, produced by refinement.
    pub min_rel_width: f64,
    /// Number of pieces a refined cell is cut into.
    pub subdivisions: usize,
    /// Refine a cell when the solution grows by more than this factor across it
    /// (only above magnitude 1).
    pub max_growth: f64,
}

impl Default for ScalarOptions {
    fn default() -> Self {
        Self { blowup_threshold: 1e6, min_rel_width: 2.5e-4, subdivisions: 8, max_growth: 1.2 }
    }
}

/// Solves `Φ − w·G(Φ) = r` by damped Newton started at `x0`.
pub(crate) fn implicit_scalar<G: Fn(f64) -> f64>(g: &G, w: f64, r: f64, x0: f64) -> Option<f64> {
    let resid = |x: f64| x - w * g(x) - r;
    let mut x = x0;
    let mut fx = resid(x);
    if !fx.is_finite() {
        return None;
    }
    for _ in 0..100 {
        let scale = 1.0f64.max(x.abs()).max(r.abs());
        if fx.abs() <= 4.0 * f64::EPSILON * scale {
            return Some(x);
        }
        let dx = 1e-7 * 1.0f64.max(x.abs());
        let slope = (resid(x + dx) - resid(x - dx)) / (2.0 * dx);
        if !(slope.abs() > 0.0) || !slope.is_finite() {
            return None;
        }
        let step = fx / slope;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=40 {
            let cand = x - lambda * step;
            let fc = resid(cand);
            if fc.is_finite() && fc.abs() < fx.abs() {
                x = cand;
                fx = fc;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            let scale = 1.0f64.max(x.abs()).max(r.abs());
            return (fx.abs() <= 1e-10 * scale).then_some(x);
        }
    }
    let scale = 1.0f64.max(x.abs()).max(r.abs());
    (fx.abs() <= 1e-10 * scale).then_some(x)
}

/// Generic scalar Volterra solver `Φ = Φ₀ + l ∗ G(Φ)` with local refinement.
///
/// A cell is cut into `subdivisions` pieces whenever the implicit solve has no
/// root, the value passes `blowup_threshold`, or the value grows by more than
/// `max_growth` across it; cells are never cut below `min_rel_width`. At that
/// width, passing the threshold (or losing the root while growing) is reported
/// as a blow-up bracketed by the cell; anything else is a failure.
pub fn solve_scalar_volterra<G: Fn(f64) -> f64>(
    pair: &KernelPair,
    phi0: f64,
    g: G,
    grid: &TimeGrid,
    scheme: Scheme,
    options: &ScalarOptions,
) -> Result<ScalarTrace> {
    if !phi0.is_finite() {
        return Err(Error::InvalidParameter { what: "initial value", value: phi0 });
    }
    if grid.horizon() > pair.horizon() {
        return Err(Error::Range { what: "grid beyond the kernel horizon", value: grid.horizon() });
    }
    let mut times = Vec::with_capacity(grid.n_steps() + 1);
    let mut values = Vec::with_capacity(grid.n_steps() + 1);
    let mut gvals = Vec::with_capacity(grid.n_steps() + 1);
    times.push(0.0);
    values.push(phi0);
    gvals.push(g(phi0));
    let mut pending: Vec<f64> = grid.nodes()[1..].iter().rev().copied().collect();
    let mut row = Vec::new();
    let mut work = Vec::new();
    while let Some(tn) = pending.pop() {
        work.clear();
        work.extend_from_slice(&times);
        work.push(tn);
        row_weights(pair, &work, &mut row)?;
        let n = times.len();
        let prev = values[n - 1];
        let candidate = match scheme {
            Scheme::Explicit => {
                let mut s = phi0;
                for j in 0..n {
                    s += row[j] * gvals[j];
                }
                s.is_finite().then_some(s)
            }
            Scheme::Implicit => {
                let mut r = phi0;
                for j in 0..n - 1 {
                    r += row[j] * gvals[j + 1];
                }
                if r.is_finite() {
                    implicit_scalar(&g, row[n - 1], r, prev)
                } else {
                    None
                }
            }
        };
        let t_prev = times[n - 1];
        let too_big = candidate.is_none_or(|v| v.abs() > options.blowup_threshold);
        let jumped = candidate.is_some_and(|v| {
            v.abs() > 1.0 && v.abs() > options.max_growth * prev.abs().max(1.0)
        });
        if too_big || jumped {
            let width = tn - t_prev;
            if width > options.min_rel_width * tn {
                pending.push(tn);
                let m = options.subdivisions.max(2);
                for i in (1..m).rev() {
                    pending.push(t_prev + width * (i as f64 / m as f64));
                }
                continue;
            }
            if too_big {
                let growing = n < 2 || prev >= values[n - 2];
                let status = if candidate.is_some() || growing {
                    TraceStatus::BlowUp { t_low: t_prev, t_high: tn }
                } else {
                    TraceStatus::Failed { reason: "implicit step has no solution", at: tn }
                };
                return Ok(ScalarTrace { times, values, status });
            }
        }
        let v = candidate.expect("checked above");
        times.push(tn);
        values.push(v);
        gvals.push(g(v));
    }
    Ok(ScalarTrace { times, values, status: TraceStatus::Completed })
}

/// Solves `∂ₜ(k ∗ (Φ - Φ₀)) + λ₁Φ = f(Φ)` and brackets a blow-up.
///
/// The implicit scheme over-estimates a monotonically growing solution and the
/// explicit one under-estimates it, so the reported bracket runs from the
/// implicit lower end to the explicit upper end (the implicit cell alone when
/// the explicit run stays bounded).
pub fn solve_scalar_nonlinear(
    pair: &KernelPair,
    lambda1: f64,
    source: &NonlinearSource,
    phi0: f64,
    grid: &TimeGrid,
    blowup_threshold: f64,
) -> Result<ScalarTrace> {
    if !(phi0 >= 0.0) {
        return Err(Error::InvalidParameter { what: "phi0", value: phi0 });
    }
    if !(lambda1 >= 0.0) {
        return Err(Error::InvalidParameter { what: "lambda1", value: lambda1 });
    }
    if !(blowup_threshold >= 1e3) {
        return Err(Error::InvalidParameter { what: "blowup_threshold", value: blowup_threshold });
    }
    let options = ScalarOptions { blowup_threshold, ..ScalarOptions::default() };
    let g = |x: f64| source.eval(x) - lambda1 * x;
    solve_with_bracket(pair, phi0, g, grid, &options)
}

/// Implicit solve whose blow-up bracket is widened by the explicit run.
pub fn solve_with_bracket<G: Fn(f64) -> f64>(
    pair: &KernelPair,
    phi0: f64,
    g: G,
    grid: &TimeGrid,
    options: &ScalarOptions,
) -> Result<ScalarTrace> {
    let mut trace = solve_scalar_volterra(pair, phi0, &g, grid, Scheme::Implicit, options)?;
    if let TraceStatus::BlowUp { t_low, t_high } = trace.status {
        let explicit = solve_scalar_volterra(pair, phi0, &g, grid, Scheme::Explicit, options)?;
        let upper = match explicit.status {
            TraceStatus::BlowUp { t_high: e, .. } => e.max(t_high),
            _ => t_high,
        };
        trace.status = TraceStatus::BlowUp { t_low, t_high: upper };
    }
    Ok(trace)
}

/// Solves `∂ₜ(g_{1-α} ∗ (U - U₀)) + C U^γ = 0` (implicit scheme).
pub fn solve_power_decay(alpha: f64, c: f64, gamma_exp: f64, u0: f64, grid: &TimeGrid) -> Result<ScalarTrace> {
    let pair = KernelPair::new(SonineSpec::RiemannLiouville { alpha })?;
    if !(c > 0.0) {
        return Err(Error::InvalidParameter { what: "decay constant", value: c });
    }
    if !(gamma_exp > 0.0) {
        return Err(Error::InvalidParameter { what: "gamma", value: gamma_exp });
    }
    if !(u0 >= 0.0) || !u0.is_finite() {
        return Err(Error::InvalidParameter { what: "U0", value: u0 });
    }
    let g = |x: f64| -c * x.max(0.0).powf(gamma_exp);
    let options = ScalarOptions { blowup_threshold: f64::INFINITY, ..ScalarOptions::default() };
    solve_scalar_volterra(&pair, u0, g, grid, Scheme::Implicit, &options)
}

/// The closed-form blow-up time bracket for `k = g_{1-α}`, `f(u) = u(u-1)`:
/// `(Γ(α+1)/(4(c₀+1/2)))^{1/α} ≤ T* ≤ (Γ(α+1)/c₀)^{1/α}`.
pub fn bracket_blowup_closed_form(alpha: f64, c0: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter { what: "alpha", value: alpha });
    }
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::InvalidParameter { what: "c0", value: c0 });
    }
    let g = gamma(alpha + 1.0)?;
    let p = 1.0 / alpha;
    Ok(((g / (4.0 * (c0 + 0.5))).powf(p), (g / c0).powf(p)))
}

/// Least-squares slope of `ln v` against `ln t` over samples with `t ∈ [t_lo, t_hi]`.
pub fn fit_loglog_slope(times: &[f64], values: &[f64], t_lo: f64, t_hi: f64) -> Result<f64> {
    let mut n = 0.0;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (&t, &v) in times.iter().zip(values) {
        if t >= t_lo && t <= t_hi && t > 0.0 && v > 0.0 {
            let (x, y) = (t.ln(), v.ln());
            n += 1.0;
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
    }
    let den = n * sxx - sx * sx;
    if n < 3.0 || !(den > 0.0) {
        return Err(Error::Degenerate("fewer than three positive samples in the fit window"));
    }
    Ok((n * sxy - sx * sy) / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_one_is_uniform() {
        let a = TimeGrid::uniform(3.0, 17).unwrap();
        let b = TimeGrid::graded(3.0, 17, 1.0).unwrap();
        for (x, y) in a.nodes().iter().zip(b.nodes()) {
            assert!((x - y).abs() <= 4.0 * f64::EPSILON * 3.0);
        }
    }

    #[test]
    fn rl_first_weight() {
        let pair = KernelPair::new(SonineSpec::RiemannLiouville { alpha: 0.5 }).unwrap();
        let grid = TimeGrid::uniform(1.0, 4).unwrap();
        let w = build_weights(&pair, &grid).unwrap();
        assert!((w.weight(1, 0) - 0.5 / 0.886_226_925_452_758).abs() < 1e-14);
    }

    #[test]
    fn closed_form_bracket_shrinks_with_c0() {
        let (lo, hi) = bracket_blowup_closed_form(0.5, 4.0).unwrap();
        assert!(lo < hi);
        assert!((hi - (0.886_226_925_452_758f64 / 4.0).powi(2)).abs() < 1e-14);
        let (lo2, hi2) = bracket_blowup_closed_form(0.5, 1e8).unwrap();
        assert!(lo2 < lo && hi2 < 1e-14);
        assert!(bracket_blowup_closed_form(0.5, 0.0).is_err());
    }

    #[test]
    fn newton_finds_the_smaller_root() {
        // x - 0.1 x² = 1 has roots 1.127.. and 8.87..
        let x = implicit_scalar(&|x: f64| x * x, 0.1, 1.0, 1.0).unwrap();
        assert!((x - (5.0 - 15f64.sqrt())).abs() < 1e-12);
        // x - x² = 1 has no real root
        assert!(implicit_scalar(&|x: f64| x * x, 1.0, 1.0, 1.0).is_none());
    }
}
