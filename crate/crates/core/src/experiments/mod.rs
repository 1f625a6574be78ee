//! Desk-scale limit studies and operator-bound scans.
//!
//! Every experiment returns an [`ExperimentReport`]: a parameter grid, named
//! per-parameter metrics, fitted slopes and a list of registered
//! [`Criterion`]s. Verdicts are recomputed from the stored numbers by
//! [`ExperimentReport::evaluate`], so a deserialized report can be re-judged
//! without rerunning anything.

mod bounds;
mod limits;
mod report;

pub use bounds::{
    product_bound_audit, product_two_mode_ratio, qdelta_scan, strichartz_alpha, strichartz_beta,
    strichartz_exponents, s0,
};
pub use limits::{
    deep_water, deep_water_gap, shallow_water, shallow_water_gap, twin_solver, SolverParams,
};
pub use report::{Check, Criterion, ExperimentReport, Provenance, Verdict, CODE_VERSION};
