//! Sonine pairs `(k, l)` with `(k ∗ l)(t) = 1` for `t > 0`.
//!
//! Every variant exposes `k`, `l` and their running integrals
//! `K = 1 ∗ k`, `L = 1 ∗ l`. The time-stepping weights are differences of `L`,
//! so the closed forms for `L` matter more than those for `l`:
//!
//! | variant | `l(t)` | `(1 ∗ l)(t)` |
//! |---|---|---|
//! | Dirac | `1` | `t` |
//! | Riemann–Liouville | `g_α` | `g_{α+1}` |
//! | Tempered | `g_α e^{-μt} + μA(t)`, `A = μ^{-α}P(α, μt)` | `A(1+μt) - αμ^{-α}P(α+1, μt)` |
//! | Bessel | `t^{-α/2} I_{-α}(2√t)` | `t^{(1-α)/2} I_{1-α}(2√t)` |
//! | Mittag-Leffler | `t^{β-1}E_{α,β}(-t^α)` | `t^β E_{α,β+1}(-t^α)` |
//! | distributed order | `e^t E₁(t)` | `e^t E₁(t) + ln t + γ` |
//! | multi-term | tabulated by [`numeric_associate`] | exact integral of the table |
//!
//! where `g_μ(t) = t^{μ-1}/Γ(μ)` and `P` is the regularized lower incomplete Gamma function.

use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{tanh_sinh_with_distances, GaussLegendre};
use crate::specfun::{
    bessel_i, bessel_j, exp_integral_e1_scaled, gamma_p, mittag_leffler, rgamma, EULER_GAMMA,
};
use crate::tstep::TimeGrid;

/// Parameters of a catalog Sonine pair.
#[derive(Debug, Clone, PartialEq)]
pub enum SonineSpec {
    /// `k = δ`, `l = 1`: the classical time derivative.
    Dirac,
    /// `k = g_{1-α}`, `l = g_α`, `α ∈ (0, 1)`.
    RiemannLiouville { alpha: f64 },
    /// `k = ∫₀¹ g_a da`.
    DistributedOrder,
    /// `k = g_{1-α} e^{-μt}`, `α ∈ (0, 1)`, `μ > 0`.
    Tempered { alpha: f64, mu: f64 },
    /// `k = t^{(α-1)/2} J_{α-1}(2√t)`, `α ∈ (0, 1)`.
    BesselPair { alpha: f64 },
    /// `k = g_{1-β+α} + g_{1-β}`, `0 < α < β < 1`.
    MittagLefflerPair { alpha: f64, beta: f64 },
    /// `k = Σ_j g_{1-α_j}` with `1 > α_1 > ... > α_m > 0`.
    MultiTerm { alphas: Vec<f64> },
}

fn unit_open(what: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { what, value: x })
    }
}

impl SonineSpec {
    /// Checks the parameter constraints of the variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            SonineSpec::Dirac | SonineSpec::DistributedOrder => Ok(()),
            SonineSpec::RiemannLiouville { alpha } | SonineSpec::BesselPair { alpha } => {
                unit_open("alpha", *alpha)
            }
            SonineSpec::Tempered { alpha, mu } => {
                unit_open("alpha", *alpha)?;
                if *mu > 0.0 && mu.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter { what: "mu", value: *mu })
                }
            }
            SonineSpec::MittagLefflerPair { alpha, beta } => {
                unit_open("alpha", *alpha)?;
                unit_open("beta", *beta)?;
                if alpha < beta {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter { what: "beta (must exceed alpha)", value: *beta })
                }
            }
            SonineSpec::MultiTerm { alphas } => {
                if alphas.is_empty() {
                    return Err(Error::InvalidParameter { what: "alphas (empty)", value: 0.0 });
                }
                for a in alphas {
                    unit_open("alphas", *a)?;
                }
                for w in alphas.windows(2) {
                    if w[1] >= w[0] {
                        return Err(Error::InvalidParameter {
                            what: "alphas (must be strictly decreasing)",
                            value: w[1],
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// `k(t)` for `t > 0`. The Dirac kernel has no pointwise values.
    pub fn k(&self, t: f64) -> Result<f64> {
        positive_time(t)?;
        match self {
            SonineSpec::Dirac => Err(Error::Unavailable("pointwise values of the Dirac kernel")),
            SonineSpec::RiemannLiouville { alpha } => Ok(g(1.0 - alpha, t)),
            SonineSpec::DistributedOrder => Ok(order_integral(t, 0.0)),
            SonineSpec::Tempered { alpha, mu } => Ok(g(1.0 - alpha, t) * (-mu * t).exp()),
            SonineSpec::BesselPair { alpha } => {
                let nu = alpha - 1.0;
                Ok(t.powf(0.5 * nu) * bessel_j(nu, 2.0 * t.sqrt())?)
            }
            SonineSpec::MittagLefflerPair { alpha, beta } => {
                Ok(g(1.0 - beta + alpha, t) + g(1.0 - beta, t))
            }
            SonineSpec::MultiTerm { alphas } => Ok(alphas.iter().map(|a| g(1.0 - a, t)).sum()),
        }
    }

    /// `(1 ∗ k)(t)` for `t ≥ 0`; the Dirac kernel integrates to the Heaviside step.
    pub fn cum_k(&self, t: f64) -> Result<f64> {
        nonnegative_time(t)?;
        if t == 0.0 {
            return Ok(if matches!(self, SonineSpec::Dirac) { 1.0 } else { 0.0 });
        }
        match self {
            SonineSpec::Dirac => Ok(1.0),
            SonineSpec::RiemannLiouville { alpha } => Ok(g(2.0 - alpha, t)),
            SonineSpec::DistributedOrder => Ok(order_integral(t, 1.0)),
            SonineSpec::Tempered { alpha, mu } => {
                Ok(mu.powf(alpha - 1.0) * gamma_p(1.0 - alpha, mu * t)?)
            }
            SonineSpec::BesselPair { alpha } => {
                Ok(t.powf(0.5 * alpha) * bessel_j(*alpha, 2.0 * t.sqrt())?)
            }
            SonineSpec::MittagLefflerPair { alpha, beta } => {
                Ok(g(2.0 - beta + alpha, t) + g(2.0 - beta, t))
            }
            SonineSpec::MultiTerm { alphas } => Ok(alphas.iter().map(|a| g(2.0 - a, t)).sum()),
        }
    }

    /// Whether `l ∈ L¹(ℝ₊)`. No catalog variant qualifies: each `(1 ∗ l)` is unbounded.
    pub fn l_integrable_on_halfline(&self) -> bool {
        false
    }
}

/// `1 ∗ k` as a sum of powers `Σ c_i t^{e_i}` where the variant allows it.
enum CumK<'a> {
    Powers(Vec<(f64, f64)>),
    General(&'a SonineSpec),
}

impl<'a> CumK<'a> {
    fn new(spec: &'a SonineSpec) -> Self {
        let power = |mu: f64| (rgamma(mu), mu - 1.0);
        match spec {
            SonineSpec::RiemannLiouville { alpha } => CumK::Powers(alloc::vec![power(2.0 - alpha)]),
            SonineSpec::MittagLefflerPair { alpha, beta } => {
                CumK::Powers(alloc::vec![power(2.0 - beta + alpha), power(2.0 - beta)])
            }
            SonineSpec::MultiTerm { alphas } => {
                CumK::Powers(alphas.iter().map(|a| power(2.0 - a)).collect())
            }
            other => CumK::General(other),
        }
    }

    fn eval(&self, t: f64) -> Result<f64> {
        match self {
            CumK::Powers(terms) => {
                if t == 0.0 {
                    return Ok(0.0);
                }
                let ln_t = t.ln();
                Ok(terms.iter().map(|(c, e)| c * (e * ln_t).exp()).sum())
            }
            CumK::General(spec) => spec.cum_k(t),
        }
    }
}

/// `g_μ(t) = t^{μ-1}/Γ(μ)`.
pub fn g(mu: f64, t: f64) -> f64 {
    t.powf(mu - 1.0) * rgamma(mu)
}

fn positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what: "kernel time", value: t })
    }
}

fn nonnegative_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what: "kernel time", value: t })
    }
}

/// `∫₀¹ t^{a+shift-1} / Γ(a+shift) da` for `shift ∈ {0, 1}`.
///
/// For small `t` the integrand concentrates near `a = 0` on a scale `1/|ln t|`,
/// so the order interval is split geometrically from there.
fn order_integral(t: f64, shift: f64) -> f64 {
    let rule = GaussLegendre::new(32);
    let ln_t = t.ln();
    let f = |a: f64| ((a + shift - 1.0) * ln_t).exp() * rgamma(a + shift);
    let first = if ln_t < -20.0 { 2.0 / -ln_t } else { 0.1 };
    let mut lo = 0.0;
    let mut hi = first;
    let mut sum = 0.0;
    loop {
        sum += rule.integrate(lo, hi, f);
        if hi >= 1.0 {
            break;
        }
        lo = hi;
        hi = (4.0 * hi).min(1.0);
    }
    sum
}

/// Piecewise-constant associate on a node list, as produced by [`numeric_associate`].
#[derive(Debug, Clone, PartialEq)]
pub struct AssociateTable {
    nodes: Vec<f64>,
    values: Vec<f64>,
    cum: Vec<f64>,
}

impl AssociateTable {
    fn new(nodes: Vec<f64>, values: Vec<f64>) -> Self {
        let mut cum = Vec::with_capacity(nodes.len());
        cum.push(0.0);
        let mut acc = 0.0;
        for (w, v) in nodes.windows(2).zip(&values) {
            acc += v * (w[1] - w[0]);
            cum.push(acc);
        }
        Self { nodes, values, cum }
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().unwrap_or(&0.0)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cell values, one per interval `[t_j, t_{j+1})`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn cell(&self, t: f64) -> Result<usize> {
        if t > self.horizon() {
            return Err(Error::Range { what: "time beyond the tabulated associate", value: t });
        }
        let idx = self.nodes.partition_point(|&x| x <= t);
        Ok(idx.saturating_sub(1).min(self.values.len() - 1))
    }

    fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.cell(t)?])
    }

    fn integral(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let j = self.cell(t)?;
        Ok(self.cum[j] + self.values[j] * (t - self.nodes[j]))
    }
}

/// A Sonine pair with evaluators for `k`, `l`, `1 ∗ k` and `1 ∗ l`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelPair {
    spec: SonineSpec,
    table: Option<AssociateTable>,
}

/// Default tabulation of the multi-term associate: geometric cells on
/// `[T_MIN, HORIZON]` after a first cell `[0, T_MIN]`.
pub const MULTI_TERM_HORIZON: f64 = 1e4;
const MULTI_TERM_T_MIN: f64 = 1e-8;
const MULTI_TERM_CELLS: usize = 4096;

/// Builds the evaluators for `spec`; multi-term pairs tabulate `l` up to [`MULTI_TERM_HORIZON`].
pub fn make_pair(spec: SonineSpec) -> Result<KernelPair> {
    KernelPair::new(spec)
}

impl KernelPair {
    pub fn new(spec: SonineSpec) -> Result<Self> {
        spec.validate()?;
        let table = if let SonineSpec::MultiTerm { .. } = spec {
            let grid = TimeGrid::geometric(MULTI_TERM_T_MIN, MULTI_TERM_HORIZON, MULTI_TERM_CELLS)?;
            let sol = numeric_associate(&spec, &grid)?;
            Some(AssociateTable::new(grid.nodes().to_vec(), sol.values))
        } else {
            None
        };
        Ok(Self { spec, table })
    }

    /// Multi-term pair whose associate is tabulated on a caller-supplied grid.
    pub fn with_associate_grid(spec: SonineSpec, grid: &TimeGrid) -> Result<Self> {
        spec.validate()?;
        let sol = numeric_associate(&spec, grid)?;
        let table = Some(AssociateTable::new(grid.nodes().to_vec(), sol.values));
        Ok(Self { spec, table })
    }

    pub fn spec(&self) -> &SonineSpec {
        &self.spec
    }

    pub fn is_dirac(&self) -> bool {
        matches!(self.spec, SonineSpec::Dirac)
    }

    /// The tabulated associate, present only for multi-term pairs.
    pub fn table(&self) -> Option<&AssociateTable> {
        self.table.as_ref()
    }

    /// Largest time at which `l` and `1 ∗ l` can be evaluated.
    pub fn horizon(&self) -> f64 {
        self.table.as_ref().map_or(f64::INFINITY, AssociateTable::horizon)
    }

    pub fn l_integrable_on_halfline(&self) -> bool {
        self.spec.l_integrable_on_halfline()
    }

    pub fn k(&self, t: f64) -> Result<f64> {
        self.spec.k(t)
    }

    pub fn cum_k(&self, t: f64) -> Result<f64> {
        self.spec.cum_k(t)
    }

    /// `l(t)` for `t > 0`.
    pub fn l(&self, t: f64) -> Result<f64> {
        positive_time(t)?;
        match &self.spec {
            SonineSpec::Dirac => Ok(1.0),
            SonineSpec::RiemannLiouville { alpha } => Ok(g(*alpha, t)),
            SonineSpec::DistributedOrder => exp_integral_e1_scaled(t),
            SonineSpec::Tempered { alpha, mu } => {
                let a = mu.powf(-alpha) * gamma_p(*alpha, mu * t)?;
                Ok(g(*alpha, t) * (-mu * t).exp() + mu * a)
            }
            SonineSpec::BesselPair { alpha } => {
                Ok(t.powf(-0.5 * alpha) * bessel_i(-alpha, 2.0 * t.sqrt())?)
            }
            SonineSpec::MittagLefflerPair { alpha, beta } => {
                Ok(t.powf(beta - 1.0) * mittag_leffler(*alpha, *beta, -t.powf(*alpha))?)
            }
            SonineSpec::MultiTerm { .. } => self.tabulated()?.eval(t),
        }
    }

    /// `(1 ∗ l)(t)` for `t ≥ 0`.
    pub fn cum_l(&self, t: f64) -> Result<f64> {
        nonnegative_time(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        match &self.spec {
            SonineSpec::Dirac => Ok(t),
            SonineSpec::RiemannLiouville { alpha } => Ok(g(alpha + 1.0, t)),
            SonineSpec::DistributedOrder => Ok(distributed_cum_l(t)?),
            SonineSpec::Tempered { alpha, mu } => {
                let x = mu * t;
                let scale = mu.powf(-alpha);
                Ok(scale * (gamma_p(*alpha, x)? * (1.0 + x) - alpha * gamma_p(alpha + 1.0, x)?))
            }
            SonineSpec::BesselPair { alpha } => {
                let nu = 1.0 - alpha;
                Ok(t.powf(0.5 * nu) * bessel_i(nu, 2.0 * t.sqrt())?)
            }
            SonineSpec::MittagLefflerPair { alpha, beta } => {
                Ok(t.powf(*beta) * mittag_leffler(*alpha, beta + 1.0, -t.powf(*alpha))?)
            }
            SonineSpec::MultiTerm { .. } => self.tabulated()?.integral(t),
        }
    }

    fn tabulated(&self) -> Result<&AssociateTable> {
        self.table.as_ref().ok_or(Error::Unavailable("multi-term associate table"))
    }
}

/// `(1 ∗ l)(t)` of the cumulative associate.
pub fn cumulative_l(pair: &KernelPair, t: f64) -> Result<f64> {
    pair.cum_l(t)
}

/// `∫₀ᵗ e^s E₁(s) ds = e^t E₁(t) + ln t + γ`, rearranged for small `t` to avoid cancellation.
fn distributed_cum_l(t: f64) -> Result<f64> {
    if t <= 1.0 {
        // e^tE₁(t) = e^t(-γ - ln t - S(t)) with S = Σ_{k≥1} (-t)^k/(k·k!)
        let mut term = 1.0;
        let mut s = 0.0;
        for k in 1..60 {
            let kf = k as f64;
            term *= -t / kf;
            s += term / kf;
            if term.abs() < 1e-18 {
                break;
            }
        }
        Ok(-t.exp_m1() * (EULER_GAMMA + t.ln()) - t.exp() * s)
    } else {
        Ok(exp_integral_e1_scaled(t)? + t.ln() + EULER_GAMMA)
    }
}

/// Outcome of [`verify_sonine`].
#[derive(Debug, Clone, PartialEq)]
pub struct SonineReport {
    /// `max_t |(k ∗ l)(t) - 1|`.
    pub max_deviation: f64,
    /// Largest quadrature error estimate among the samples.
    pub max_quadrature_error: f64,
    pub pass: bool,
    /// `(t, (k ∗ l)(t))` per sample.
    pub samples: Vec<(f64, f64)>,
}

/// Evaluates `(k ∗ l)(t)` at every sample and compares it with 1.
///
/// Each convolution is split at `t/2` into
/// `l(t)K(t/2) + ∫₀^{t/2} k(s)(l(t-s) - l(t)) ds + k(t)L(t/2) + ∫₀^{t/2} l(s)(k(t-s) - k(t)) ds`,
/// whose remaining integrands are bounded; those are done by tanh-sinh.
/// Multi-term pairs integrate `K` exactly against their piecewise-constant `l`.
pub fn verify_sonine(pair: &KernelPair, t_samples: &[f64], tol: f64) -> Result<SonineReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { what: "tolerance", value: tol });
    }
    let mut samples = Vec::with_capacity(t_samples.len());
    let mut max_deviation: f64 = 0.0;
    let mut max_err: f64 = 0.0;
    for &t in t_samples {
        positive_time(t)?;
        let (value, err) = if pair.is_dirac() {
            // δ ∗ 1 = 1 identically
            (1.0, 0.0)
        } else if let Some(table) = pair.table() {
            (convolve_table(pair.spec(), table, t)?, 0.0)
        } else {
            convolve_split(pair, t)?
        };
        max_deviation = max_deviation.max((value - 1.0).abs());
        max_err = max_err.max(err);
        samples.push((t, value));
    }
    Ok(SonineReport {
        max_deviation,
        max_quadrature_error: max_err,
        pass: max_deviation <= tol,
        samples,
    })
}

fn convolve_split(pair: &KernelPair, t: f64) -> Result<(f64, f64)> {
    let half = 0.5 * t;
    let lt = pair.l(t)?;
    let kt = pair.k(t)?;
    let mut failure = None;
    let mut guard = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    // s ranges over (0, t/2); d_left = s exactly.
    let a = tanh_sinh_with_distances(
        |_, s, _| guard(pair.k(s)) * (guard(pair.l(t - s)) - lt),
        0.0,
        half,
        1e-13,
        1e-12,
    );
    let a = a.map_err(|_| Error::Numerical { what: "sonine convolution (k side)", at: t })?;
    let mut guard = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let b = tanh_sinh_with_distances(
        |_, s, _| guard(pair.l(s)) * (guard(pair.k(t - s)) - kt),
        0.0,
        half,
        1e-13,
        1e-12,
    );
    let b = b.map_err(|_| Error::Numerical { what: "sonine convolution (l side)", at: t })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let value = lt * pair.cum_k(half)? + a.value + kt * pair.cum_l(half)? + b.value;
    Ok((value, a.abs_error + b.abs_error))
}

fn convolve_table(spec: &SonineSpec, table: &AssociateTable, t: f64) -> Result<f64> {
    convolve_table_with(&CumK::new(spec), table, t)
}

fn convolve_table_with(cum_k: &CumK<'_>, table: &AssociateTable, t: f64) -> Result<f64> {
    let nodes = table.nodes();
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (j, &v) in table.values().iter().enumerate() {
        let a = nodes[j];
        if a >= t {
            break;
        }
        let b = nodes[j + 1].min(t);
        let term = v * (cum_k.eval(t - a)? - cum_k.eval(t - b)?);
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    Ok(sum)
}

/// Cellwise associate returned by [`numeric_associate`].
#[derive(Debug, Clone, PartialEq)]
pub struct AssociateSolution {
    /// Cell midpoints `(t_j + t_{j+1})/2`.
    pub midpoints: Vec<f64>,
    /// Value of `l` on each cell.
    pub values: Vec<f64>,
    /// `max_n |(k ∗ l)(t_n) - 1|` recomputed from the finished table at (up to 256) nodes.
    pub node_residual: f64,
    /// The same residual at (up to 256) cell midpoints past the first cell.
    pub midpoint_residual: f64,
}

/// Solves `(k ∗ l)(t_n) = 1` at the grid nodes for a piecewise-constant `l`.
///
/// Cell integrals of `k` are exact differences of `1 ∗ k`, so the system is
/// lower triangular with diagonal `K(t_n - t_{n-1})`.
pub fn numeric_associate(spec: &SonineSpec, grid: &TimeGrid) -> Result<AssociateSolution> {
    spec.validate()?;
    if matches!(spec, SonineSpec::Dirac) {
        return Err(Error::Unavailable("numeric associate of the Dirac kernel"));
    }
    let cum_k = CumK::new(spec);
    let nodes = grid.nodes();
    let n = nodes.len() - 1;
    let mut values: Vec<f64> = Vec::with_capacity(n);
    if grid.is_uniform() {
        // cell weights depend only on the lag: d_m = K((m+1)h) - K(mh)
        let h = nodes[1];
        let mut d = Vec::with_capacity(n);
        let mut prev = 0.0;
        for m in 1..=n {
            let cur = cum_k.eval(m as f64 * h)?;
            d.push(cur - prev);
            prev = cur;
        }
        if !(d[0] > 0.0) || !d[0].is_finite() {
            return Err(Error::Numerical { what: "associate leading weight", at: h });
        }
        for step in 1..=n {
            let known: f64 = values.iter().zip(d[1..step].iter().rev()).map(|(v, w)| v * w).sum();
            values.push((1.0 - known) / d[0]);
        }
    } else {
        let mut row = Vec::with_capacity(n + 1);
        for step in 1..=n {
            let tn = nodes[step];
            row.clear();
            for &tj in &nodes[..=step] {
                row.push(cum_k.eval(tn - tj)?);
            }
            let diag = row[step - 1] - row[step];
            if !(diag > 0.0) || !diag.is_finite() {
                return Err(Error::Numerical { what: "associate leading weight", at: tn });
            }
            let mut known = 0.0;
            for j in 0..step - 1 {
                known += values[j] * (row[j] - row[j + 1]);
            }
            values.push((1.0 - known) / diag);
        }
    }
    let midpoints: Vec<f64> = nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let table = AssociateTable::new(nodes.to_vec(), values);
    let stride = (n / 256).max(1);
    let mut node_residual: f64 = 0.0;
    for t in nodes[1..].iter().step_by(stride).chain(core::iter::once(&nodes[n])) {
        let r = convolve_table_with(&cum_k, &table, *t)?;
        node_residual = node_residual.max((r - 1.0).abs());
    }
    let mut midpoint_residual: f64 = 0.0;
    for m in midpoints.iter().skip(1).step_by(stride) {
        let r = convolve_table_with(&cum_k, &table, *m)?;
        midpoint_residual = midpoint_residual.max((r - 1.0).abs());
    }
    Ok(AssociateSolution {
        midpoints,
        values: table.values,
        node_residual,
        midpoint_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_kronrod;

    #[test]
    fn trivial_catalog_values() {
        let rl = make_pair(SonineSpec::RiemannLiouville { alpha: 0.5 }).unwrap();
        assert!((rl.k(1.0).unwrap() - 0.564_189_583_547_756).abs() < 1e-14);
        assert!((rl.cum_l(1.0).unwrap() - core::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-13);
        let d = make_pair(SonineSpec::Dirac).unwrap();
        assert_eq!(d.l(3.0).unwrap(), 1.0);
        assert_eq!(d.cum_l(2.5).unwrap(), 2.5);
        assert!(d.k(1.0).is_err());
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(make_pair(SonineSpec::RiemannLiouville { alpha: 1.5 }).is_err());
        assert!(make_pair(SonineSpec::Tempered { alpha: 0.5, mu: 0.0 }).is_err());
        assert!(make_pair(SonineSpec::MittagLefflerPair { alpha: 0.7, beta: 0.3 }).is_err());
        assert!(SonineSpec::MultiTerm { alphas: alloc::vec![0.4, 0.8] }.validate().is_err());
    }

    #[test]
    fn order_integral_matches_adaptive_quadrature() {
        for t in [1e-30, 1e-6, 0.01, 0.5, 1.0, 7.0, 300.0] {
            for shift in [0.0, 1.0] {
                let f = |a: f64| t.powf(a + shift - 1.0) * rgamma(a + shift);
                let q = gauss_kronrod(f, 0.0, 1.0, 0.0, 1e-14).unwrap();
                let v = order_integral(t, shift);
                assert!(((v - q.value) / q.value).abs() < 1e-11, "t = {t}, shift = {shift}");
            }
        }
    }

    #[test]
    fn distributed_cum_l_branches_agree() {
        let t: f64 = 1.0;
        let direct = exp_integral_e1_scaled(t).unwrap() + t.ln() + EULER_GAMMA;
        assert!((distributed_cum_l(t).unwrap() - direct).abs() < 1e-14);
    }
}
