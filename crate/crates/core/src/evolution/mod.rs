//! Time integration of ILW, BO, KdV and scaled ILW on the torus.
//!
//! Every equation has the form `∂ₜû = ℓ(ξ)û + iξ·(u²)^` (the quadratic term
//! switched off for the `*_linear` variants). The linear generator `ℓ` comes
//! from a [`LinearModel`] looked up by name in an [`EquationRegistry`]; the
//! integrator applies it exactly through an integrating factor.

mod config;
mod equation;
mod integrator;
mod invariants;

pub use config::{Dealias, EvolutionConfig, Trajectory};
pub use equation::{EquationParams, EquationRegistry, LinearModel, PerturbationReading};
pub use integrator::{evolve, evolve_final, self_convergence, SelfConvergence, BLOWUP_THRESHOLD};
pub use invariants::{galilean_conjugate, galilean_conjugate_trajectory, invariant_report, InvariantReport};
