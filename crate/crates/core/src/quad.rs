//! Quadrature rules.
//!
//! Three families are provided:
//!
//! - fixed [`GaussLegendre`] rules, used where the integrand is known to be
//!   smooth (the order-integral of the distributed-order kernel);
//! - adaptive Gauss–Kronrod (7/15 points) for smooth integrands on finite
//!   intervals;
//! - double-exponential rules ([`tanh_sinh`] on `[a, b]`, [`exp_sinh`] on
//!   `[a, ∞)`), which tolerate algebraic and logarithmic endpoint
//!   singularities at `a` (and `b` for `tanh_sinh`).

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use num_traits::Float;

use crate::error::{Error, Result};

/// Value of a quadrature together with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre polynomial `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let d = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + d * x, d * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes at odd Kronrod indices (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * KRONROD_WEIGHTS[7];
    let mut gauss = fc * GAUSS_WEIGHTS[3];
    for i in 0..7 {
        let dx = d * KRONROD_NODES[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += KRONROD_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * d, ((kronrod - gauss) * d).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    const MAX_SEGMENTS: usize = 4000;
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let mut segments: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = gk15(&mut f, a, b);
    segments.push((a, b, v, e));
    let mut evaluations = 15;
    loop {
        let (value, err) = segments
            .iter()
            .fold((0.0, 0.0), |(s, e), seg| (s + seg.2, e + seg.3));
        if !value.is_finite() {
            return Err(Error::Numerical { what: "adaptive quadrature (non-finite integrand)", at: a });
        }
        if err <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadResult { value, abs_error: err, evaluations });
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::Numerical { what: "adaptive quadrature", at: a });
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, s)| if s.3 > best.1 { (i, s.3) } else { best });
        let (lo, hi, _, _) = segments.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Numerical { what: "adaptive quadrature (interval underflow)", at: mid });
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evaluations += 30;
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
    }
}

const DE_MAX_LEVEL: u32 = 11;
const DE_T_MAX: f64 = 6.5;

/// Tanh-sinh quadrature on `[a, b]`.
///
/// Abscissae cluster double-exponentially at both ends; the integrand is
/// never evaluated exactly at `a` or `b`. Converged when two successive
/// step halvings agree to `max(abs_tol, rel_tol·|I|)`.
pub fn tanh_sinh<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    tanh_sinh_with_distances(|x, _, _| f(x), a, b, abs_tol, rel_tol)
}

/// Tanh-sinh quadrature whose integrand also receives the distances
/// `x - a` and `b - x`, computed without cancellation.
///
/// Singular factors such as `(b - x)^{-1/2}` should be formed from these
/// distances: near `b` the abscissa itself rounds to `b`.
pub fn tanh_sinh_with_distances<F: FnMut(f64, f64, f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let half = 0.5 * (b - a);
    let centre = 0.5 * (a + b);
    let mut evaluations = 0usize;

    // Contribution of the abscissa pair at ±t (or the centre for t = 0).
    let mut pair_sum = |t: f64, f: &mut F| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let e2u = (-2.0 * u.abs()).exp();
        // 1/cosh²(u) = 4 e^{-2|u|} / (1 + e^{-2|u|})²
        let w = half * FRAC_PI_2 * t.cosh() * 4.0 * e2u / ((1.0 + e2u) * (1.0 + e2u));
        if t == 0.0 {
            evaluations += 1;
            return w * f(centre, half, half);
        }
        // Distance of the abscissa from the nearer endpoint.
        let offset = 2.0 * half * e2u / (1.0 + e2u);
        if offset == 0.0 || w == 0.0 {
            return 0.0;
        }
        evaluations += 2;
        let width = 2.0 * half;
        let fl = f(a + offset, offset, width - offset);
        let fr = f(b - offset, width - offset, offset);
        let mut s = 0.0;
        if fl.is_finite() {
            s += w * fl;
        }
        if fr.is_finite() {
            s += w * fr;
        }
        s
    };

    let mut h = 1.0;
    let mut sum = pair_sum(0.0, &mut f);
    let mut k = 1;
    while (k as f64) * h <= DE_T_MAX {
        sum += pair_sum(k as f64 * h, &mut f);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut last_err = f64::INFINITY;
    for level in 1..=DE_MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= DE_T_MAX {
            sum += pair_sum(k as f64 * h, &mut f);
            k += 2;
        }
        let next = sum * h;
        let err = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            return Err(Error::Numerical { what: "tanh-sinh quadrature (non-finite)", at: a });
        }
        if level >= 3 && err <= abs_tol.max(rel_tol * estimate.abs()) {
            return Ok(QuadResult { value: estimate, abs_error: err, evaluations });
        }
        last_err = err;
    }
    let _ = last_err;
    Err(Error::Numerical { what: "tanh-sinh quadrature", at: b })
}

/// Exp-sinh quadrature on `[a, ∞)` for integrands decaying at infinity.
///
/// Tolerates an integrable singularity at `a`.
pub fn exp_sinh<F: FnMut(f64) -> f64>(mut f: F, a: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    let mut evaluations = 0usize;
    let mut term = |t: f64, f: &mut F| -> f64 {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        if e == 0.0 || !e.is_finite() {
            return 0.0;
        }
        let x = a + e;
        if x == a {
            return 0.0;
        }
        evaluations += 1;
        let v = f(x);
        if !v.is_finite() {
            return 0.0;
        }
        FRAC_PI_2 * t.cosh() * e * v
    };
    const T_MIN: f64 = -6.5;
    const T_MAX: f64 = 6.5;
    let mut h = 0.5;
    let mut sum = 0.0;
    let mut k: i64 = (T_MIN / h) as i64;
    while (k as f64) * h <= T_MAX {
        sum += term(k as f64 * h, &mut f);
        k += 1;
    }
    let mut estimate = sum * h;
    for level in 1..=DE_MAX_LEVEL {
        h *= 0.5;
        let mut k: i64 = (T_MIN / h) as i64;
        if k % 2 == 0 {
            k += 1;
        }
        while (k as f64) * h <= T_MAX {
            sum += term(k as f64 * h, &mut f);
            k += 2;
        }
        let next = sum * h;
        let err = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            return Err(Error::Numerical { what: "exp-sinh quadrature (non-finite)", at: a });
        }
        if level >= 3 && err <= abs_tol.max(rel_tol * estimate.abs()) {
            return Ok(QuadResult { value: estimate, abs_error: err, evaluations });
        }
    }
    Err(Error::Numerical { what: "exp-sinh quadrature", at: a })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // degree 15 is the exactness limit for 8 nodes
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let w: f64 = rule.mapped(-1.0, 1.0).map(|(_, w)| w).sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_64_is_accurate() {
        let rule = GaussLegendre::new(64);
        let v = rule.integrate(0.0, PI, |x| x.sin());
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod_smooth() {
        let r = gauss_kronrod(|x| (-x * x).exp(), 0.0, 3.0, 1e-13, 0.0).unwrap();
        // erf(3)·√π/2
        let expect = 0.886_226_925_452_758 * libm::erf(3.0);
        assert!((r.value - expect).abs() < 1e-12);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        // ∫₀¹ x^{-0.9} dx = 10
        let r = tanh_sinh(|x| x.powf(-0.9), 0.0, 1.0, 1e-11, 0.0).unwrap();
        assert!((r.value - 10.0).abs() < 1e-8, "{}", r.value);
        // ∫₀¹ ln x dx = -1
        let r = tanh_sinh(|x| x.ln(), 0.0, 1.0, 1e-13, 0.0).unwrap();
        assert!((r.value + 1.0).abs() < 1e-12);
        // ∫₀¹ (1-x)^{-0.5} dx = 2
        let r = tanh_sinh_with_distances(|_, _, d| d.powf(-0.5), 0.0, 1.0, 1e-12, 0.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn exp_sinh_half_line() {
        // Γ(0.3) = ∫₀^∞ x^{-0.7} e^{-x} dx
        let r = exp_sinh(|x| x.powf(-0.7) * (-x).exp(), 0.0, 1e-12, 1e-13).unwrap();
        assert!((r.value - 2.991_568_987_687_591).abs() < 1e-10, "{}", r.value);
        let r = exp_sinh(|x| 1.0 / (1.0 + x * x), 0.0, 1e-12, 1e-13).unwrap();
        assert!((r.value - FRAC_PI_2).abs() < 1e-10);
    }
}
