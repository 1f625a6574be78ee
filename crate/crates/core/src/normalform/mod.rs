//! Resonance functions and normal-form multilinear operators on the integer
//! frequency lattice of the standard torus, with randomized operator-norm
//! audits and a discrete check of the first integration-by-parts identity.
//!
//! All operators act on Fourier coefficients by direct lattice summation,
//! with `σ(ξ,ξ₁,ξ₂) = 1_{ξ≥1}·1_{ξ₁≥1}·1_{ξ₂≤−1}`.

mod audit;
mod identity;
mod operators;
mod resonance;
mod spec;

pub use audit::{
    fit_slope, ratio_estimate, AuditConfig, AuditedOperator, OperatorRegistry, RatioReport,
};
pub use identity::{identity_mismatch, interaction_picture, nf_identity_residual, NfIdentity, Quadrature};
pub use operators::{bilinear_nf, trilinear_nf, BilinearVariant, TrilinearVariant};
pub use resonance::{omega, resonance, ResonanceKind};
pub use spec::{NormalFormSpec, Shells};
