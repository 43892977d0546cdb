//! Spectral operators on `(0, ℓ)` with homogeneous Dirichlet data.
//!
//! Every supported operator is diagonal in the sine basis
//! `φ_k(x) = √(2/ℓ) sin(kπx/ℓ)`. Nodal values live on the `M = 4N` interior
//! points `x_i = iℓ/(M+1)`, where the sampled sines are exactly orthogonal
//! (type-I discrete sine transform), so modal → nodal → modal is exact up to
//! rounding.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::error::{Error, Result};

/// Nodal points per retained mode.
pub const OVERSAMPLING: usize = 4;

/// The operator families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    /// `-∂²ₓ` on `(0, length)`; `λ = (kπ/ℓ)²`.
    DirichletLaplacian { length: f64 },
    /// `(-∂²ₓ)^s` in spectral form; `λ = (kπ/ℓ)^{2s}`.
    SpectralFractionalLaplacian { length: f64, s: f64 },
    /// `-v''(x) + ε v''(1 - x)` on `(0, 1)`; `λ = (kπ)²(1 + ε(-1)^k)`.
    Involution { epsilon: f64 },
}

impl OperatorKind {
    pub fn length(&self) -> f64 {
        match *self {
            OperatorKind::DirichletLaplacian { length }
            | OperatorKind::SpectralFractionalLaplacian { length, .. } => length,
            OperatorKind::Involution { .. } => 1.0,
        }
    }

    /// Eigenvalue belonging to `sin(kπx/ℓ)`.
    pub fn eigenvalue_of_wavenumber(&self, k: usize) -> f64 {
        let kf = k as f64;
        match *self {
            OperatorKind::DirichletLaplacian { length } => (kf * PI / length).powi(2),
            OperatorKind::SpectralFractionalLaplacian { length, s } => (kf * PI / length).powf(2.0 * s),
            OperatorKind::Involution { epsilon } => {
                let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                (kf * PI).powi(2) * (1.0 + epsilon * sign)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            OperatorKind::DirichletLaplacian { length } => positive_length(length),
            OperatorKind::SpectralFractionalLaplacian { length, s } => {
                positive_length(length)?;
                if s > 0.0 && s < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter { what: "fractional order s", value: s })
                }
            }
            OperatorKind::Involution { epsilon } => {
                if epsilon.abs() < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter { what: "involution epsilon", value: epsilon })
                }
            }
        }
    }
}

fn positive_length(length: f64) -> Result<()> {
    if length > 0.0 && length.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { what: "length", value: length })
    }
}

/// A truncated spectral operator: wavenumbers `1..=N` ordered by eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    kind: OperatorKind,
    wavenumbers: Vec<usize>,
    eigenvalues: Vec<f64>,
    /// `table[i * N + m] = φ_{wavenumbers[m]}(x_i)`.
    table: Vec<f64>,
}

/// Builds the operator with `n_modes` sine modes.
pub fn build_operator(kind: OperatorKind, n_modes: usize) -> Result<SpectralOperator> {
    SpectralOperator::new(kind, n_modes)
}

impl SpectralOperator {
    pub fn new(kind: OperatorKind, n_modes: usize) -> Result<Self> {
        kind.validate()?;
        if n_modes == 0 {
            return Err(Error::InvalidParameter { what: "n_modes", value: 0.0 });
        }
        let mut wavenumbers: Vec<usize> = (1..=n_modes).collect();
        // stable sort keeps ties in wavenumber order
        wavenumbers.sort_by(|a, b| {
            kind.eigenvalue_of_wavenumber(*a).total_cmp(&kind.eigenvalue_of_wavenumber(*b))
        });
        let eigenvalues: Vec<f64> = wavenumbers.iter().map(|&k| kind.eigenvalue_of_wavenumber(k)).collect();
        let m = OVERSAMPLING * n_modes;
        let scale = (2.0 / kind.length()).sqrt();
        let mut table = Vec::with_capacity(m * n_modes);
        for i in 1..=m {
            for &k in &wavenumbers {
                // reduce k·i mod 2(M+1) before taking the sine
                let r = (k * i) % (2 * (m + 1));
                table.push(scale * (PI * r as f64 / (m + 1) as f64).sin());
            }
        }
        Ok(Self { kind, wavenumbers, eigenvalues, table })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn n_modes(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn n_nodes(&self) -> usize {
        OVERSAMPLING * self.n_modes()
    }

    pub fn length(&self) -> f64 {
        self.kind.length()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Wavenumber of each mode, in eigenvalue order.
    pub fn wavenumbers(&self) -> &[usize] {
        &self.wavenumbers
    }

    /// `C_L`, the smallest eigenvalue.
    pub fn coercivity_constant(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Interior nodes `x_i = iℓ/(M+1)`, `i = 1..=M`.
    pub fn nodes(&self) -> Vec<f64> {
        let m = self.n_nodes();
        let h = self.length() / (m + 1) as f64;
        (1..=m).map(|i| h * i as f64).collect()
    }

    /// Node spacing `ℓ/(M+1)`.
    pub fn spacing(&self) -> f64 {
        self.length() / (self.n_nodes() + 1) as f64
    }

    /// `φ(x)` of the mode at position `index` in eigenvalue order.
    pub fn eigenfunction(&self, index: usize, x: f64) -> f64 {
        let len = self.length();
        let k = self.wavenumbers[index] as f64;
        (2.0 / len).sqrt() * (k * PI * x / len).sin()
    }

    /// Mode index of wavenumber `k`, if retained.
    pub fn index_of_wavenumber(&self, k: usize) -> Option<usize> {
        self.wavenumbers.iter().position(|&w| w == k)
    }

    /// Nodal samples of a modal vector.
    pub fn synthesize(&self, modal: &[f64], nodal: &mut [f64]) {
        let n = self.n_modes();
        for (i, out) in nodal.iter_mut().enumerate() {
            let row = &self.table[i * n..(i + 1) * n];
            *out = row.iter().zip(modal).map(|(a, b)| a * b).sum();
        }
    }

    /// Modal coefficients of nodal samples (exact for sine polynomials of degree ≤ M).
    pub fn analyze(&self, nodal: &[f64], modal: &mut [f64]) {
        let n = self.n_modes();
        let h = self.spacing();
        modal.iter_mut().for_each(|c| *c = 0.0);
        for (i, &v) in nodal.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let row = &self.table[i * n..(i + 1) * n];
            for (c, phi) in modal.iter_mut().zip(row) {
                *c += v * phi;
            }
        }
        modal.iter_mut().for_each(|c| *c *= h);
    }
}

/// Which representation of a [`Field`] is authoritative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Modal,
    Nodal,
    Both,
}

/// A function on the interval, held by eigen-coefficients and/or interior samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    modal: Vec<f64>,
    nodal: Vec<f64>,
    current: Representation,
}

impl Field {
    pub fn from_modal(modal: Vec<f64>) -> Self {
        Self { modal, nodal: Vec::new(), current: Representation::Modal }
    }

    pub fn from_nodal(nodal: Vec<f64>) -> Self {
        Self { modal: Vec::new(), nodal, current: Representation::Nodal }
    }

    /// The zero field, synchronized, for `op`.
    pub fn zeros(op: &SpectralOperator) -> Self {
        Self {
            modal: vec![0.0; op.n_modes()],
            nodal: vec![0.0; op.n_nodes()],
            current: Representation::Both,
        }
    }

    /// The `index`-th eigenfunction (eigenvalue order) scaled by `scale`.
    pub fn eigenmode(op: &SpectralOperator, index: usize, scale: f64) -> Self {
        let mut modal = vec![0.0; op.n_modes()];
        modal[index] = scale;
        Self::from_modal(modal)
    }

    /// Samples `u` at the interior nodes of `op`.
    pub fn sample<F: Fn(f64) -> f64>(op: &SpectralOperator, u: F) -> Self {
        Self::from_nodal(op.nodes().into_iter().map(u).collect())
    }

    pub fn representation(&self) -> Representation {
        self.current
    }

    /// Modal coefficients, if current.
    pub fn modal(&self) -> Option<&[f64]> {
        matches!(self.current, Representation::Modal | Representation::Both).then_some(&self.modal[..])
    }

    /// Interior samples, if current.
    pub fn nodal(&self) -> Option<&[f64]> {
        matches!(self.current, Representation::Nodal | Representation::Both).then_some(&self.nodal[..])
    }

    /// `‖u‖_{L²}` from the modal coefficients (Parseval).
    pub fn l2_norm(&self) -> Result<f64> {
        let m = self.modal().ok_or(Error::Unavailable("modal representation"))?;
        Ok(m.iter().map(|c| c * c).sum::<f64>().sqrt())
    }

    /// `(Σ λ_k^{2s} u_k²)^{1/2}`.
    pub fn vs_norm(&self, op: &SpectralOperator, s: f64) -> Result<f64> {
        let m = self.modal().ok_or(Error::Unavailable("modal representation"))?;
        check_shape(op.n_modes(), m.len())?;
        Ok(m.iter().zip(op.eigenvalues()).map(|(c, l)| l.powf(2.0 * s) * c * c).sum::<f64>().sqrt())
    }
}

fn check_shape(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Shape { expected, found })
    }
}

/// Fills in the modal representation.
pub fn to_modal(field: &Field, op: &SpectralOperator) -> Result<Field> {
    match field.current {
        Representation::Modal | Representation::Both => {
            check_shape(op.n_modes(), field.modal.len())?;
            Ok(field.clone())
        }
        Representation::Nodal => {
            check_shape(op.n_nodes(), field.nodal.len())?;
            let mut modal = vec![0.0; op.n_modes()];
            op.analyze(&field.nodal, &mut modal);
            Ok(Field { modal, nodal: field.nodal.clone(), current: Representation::Both })
        }
    }
}

/// Fills in the nodal representation.
pub fn to_nodal(field: &Field, op: &SpectralOperator) -> Result<Field> {
    match field.current {
        Representation::Nodal | Representation::Both => {
            check_shape(op.n_nodes(), field.nodal.len())?;
            Ok(field.clone())
        }
        Representation::Modal => {
            check_shape(op.n_modes(), field.modal.len())?;
            let mut nodal = vec![0.0; op.n_nodes()];
            op.synthesize(&field.modal, &mut nodal);
            Ok(Field { modal: field.modal.clone(), nodal, current: Representation::Both })
        }
    }
}

/// `L u`, returned in modal form.
pub fn apply_operator(op: &SpectralOperator, field: &Field) -> Result<Field> {
    let f = to_modal(field, op)?;
    let modal = f.modal.iter().zip(op.eigenvalues()).map(|(c, l)| c * l).collect();
    Ok(Field::from_modal(modal))
}

/// Both sides of `∫ u L u ≥ C_L ‖u‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoercivityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub fn coercivity_check(op: &SpectralOperator, field: &Field) -> Result<CoercivityReport> {
    let f = to_modal(field, op)?;
    let norm2: f64 = f.modal.iter().map(|c| c * c).sum();
    if norm2 == 0.0 {
        return Err(Error::Degenerate("zero field in coercivity check"));
    }
    let lhs: f64 = f.modal.iter().zip(op.eigenvalues()).map(|(c, l)| l * c * c).sum();
    let rhs = op.coercivity_constant() * norm2;
    Ok(CoercivityReport { lhs, rhs, pass: lhs >= rhs * (1.0 - 1e-12) })
}
