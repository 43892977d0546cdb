//! Numerical core for nonlocal-in-time reaction-diffusion equations
//!
//! ```text
//! ∂ₜ(k ∗ (u − u₀)) + L[u] = f(u),   x ∈ (0, ℓ),  u = 0 on the boundary,
//! ```
//!
//! where `(k, l)` is a Sonine pair (`k ∗ l ≡ 1`), `L` is a self-adjoint
//! operator with a positive discrete spectrum and `f` vanishes at 0 and 1.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! - [`specfun`]: Gamma, incomplete Gamma, Mittag-Leffler, Bessel `J`/`I`, `E₁`.
//! - [`quad`]: Gauss–Legendre, adaptive Gauss–Kronrod and double-exponential rules.
//! - [`kernels`]: the catalog of Sonine pairs, the identity checker and the
//!   numerical associate solver.
//! - [`spatial`]: spectral operators on an interval and the modal/nodal field.
//! - [`nonlin`]: reaction terms and their structural checks.
//! - [`tstep`]: time grids, product-integration weights and scalar Volterra solvers.
//! - [`pde`]: the full spectral/Volterra solver and its report checks.

#![no_std]
#![warn(missing_debug_implementations)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// once std is in the crate graph its inherent float methods shadow `Float`
#![allow(unused_imports)]

extern crate alloc;

pub mod error;
pub mod kernels;
pub mod nonlin;
pub mod pde;
pub mod quad;
pub mod spatial;
pub mod specfun;
pub mod tstep;

pub use error::{Error, Result};
pub use kernels::{KernelPair, SonineSpec};
pub use nonlin::NonlinearSource;
pub use pde::{ProblemSpec, SolveReport, SolveStatus};
pub use spatial::{Field, OperatorKind, SpectralOperator};
pub use tstep::{ConvolutionWeights, Mesh, ScalarTrace, TimeGrid, TraceStatus};
