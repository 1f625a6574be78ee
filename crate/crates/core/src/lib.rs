//! Pseudospectral laboratory for the intermediate long wave (ILW) equation
//! and its deep-water (Benjamin–Ono) and shallow-water (KdV) limits on the
//! torus.
//!
//! The crate is organised in layers:
//!
//! * [`spectral`]: grids, transforms, Fourier multipliers, Littlewood–Paley
//!   projectors and Sobolev norms.
//! * [`evolution`]: integrating-factor RK4 time stepping for ILW, BO, KdV,
//!   scaled ILW and the Galilean-conjugated perturbed BO equation. Equations
//!   are pluggable [`evolution::LinearModel`]s looked up by name.
//! * [`gauge`]: the periodic gauge transform `w = ∂ₓP₊e^{iF}` and its
//!   residual / smoothing diagnostics.
//! * [`normalform`]: resonance functions, the bilinear and trilinear
//!   normal-form operators, the first integration-by-parts identity and
//!   randomized operator-norm audits.
//! * [`experiments`]: desk-scale deep/shallow-water limit studies, the
//!   `Q_δ` smoothing scan, Strichartz exponents and the dyadic product bound.
//! * [`cli_io`]: flat key/value run configuration, report persistence and
//!   the command registry used by the `ilw-lab` binary.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod gauge;
pub mod normalform;
pub mod spectral;

pub use error::{Error, Result};
