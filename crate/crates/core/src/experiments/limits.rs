use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::bounds::s0;
use super::report::{Check, Criterion, ExperimentReport, Provenance};
use crate::error::{Error, Result};
use crate::evolution::{evolve, Dealias, EquationParams, EvolutionConfig, Trajectory};
use crate::normalform::fit_slope;
use crate::spectral::special::{coth_minus_recip, jbracket_pow};
use crate::spectral::{norm, Norm, SpectralField};

/// Time-stepping settings shared by the limit experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub dt: f64,
    pub t_final: f64,
    pub dealias: Dealias,
    pub snapshot_stride: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 1.0,
            dealias: Dealias::TwoThirds,
            snapshot_stride: 10,
        }
    }
}

impl SolverParams {
    fn config(&self, u0: &SpectralField, equation: &str, delta: Option<f64>) -> EvolutionConfig {
        let mut cfg = EvolutionConfig::new(equation, *u0.grid(), self.dt, self.t_final)
            .with_dealias(self.dealias)
            .with_stride(self.snapshot_stride);
        if let Some(d) = delta {
            cfg = cfg.with_delta(d);
        }
        cfg
    }
}

/// `|ξ²(coth(δξ) − 1/(δξ)) − ξ|ξ||`, the ILW/BO dispersion gap.
pub fn deep_water_gap(xi: f64, delta: f64) -> f64 {
    (xi * xi * coth_minus_recip(delta * xi) - xi * xi.abs()).abs()
}

/// `|δ⁻¹ξ²(coth(δξ) − 1/(δξ)) − ξ³/3|`, the sILW/KdV dispersion gap.
pub fn shallow_water_gap(xi: f64, delta: f64) -> f64 {
    (xi * xi * coth_minus_recip(delta * xi) / delta - xi.powi(3) / 3.0).abs()
}

fn ext(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(if x > 0.0 { "inf" } else { "-inf" })
    }
}

fn sup_difference(a: &Trajectory, b: &Trajectory, s: f64) -> Result<f64> {
    if a.times.len() != b.times.len() {
        return Err(Error::Internal(format!(
            "snapshot counts differ: {} vs {}",
            a.times.len(),
            b.times.len()
        )));
    }
    a.states.iter().zip(&b.states).try_fold(0.0, |acc: f64, (x, y)| {
        Ok(acc.max(norm(&x.sub(y)?, Norm::Hs { s })?))
    })
}

/// `sup_t ‖(e^{tℓ₁} − e^{tℓ₂})u₀‖_{Hˢ}` for purely dispersive flows with gap `g(ξ)`.
fn linear_closed_form(u0: &SpectralField, s: f64, times: &[f64], gap: impl Fn(f64) -> f64) -> f64 {
    let grid = u0.grid();
    let nyq = grid.nyquist_index();
    let weighted: Vec<(f64, f64)> = grid
        .indices()
        .filter(|n| *n != nyq)
        .map(|n| {
            let xi = n as f64 * grid.frequency_scale();
            (jbracket_pow(xi, 2.0 * s) * u0.coeff(n).norm_sqr(), gap(xi))
        })
        .collect();
    times
        .iter()
        .map(|t| {
            let sum: f64 = weighted
                .iter()
                .map(|(w, g)| w * (2.0 * (0.5 * t * g).sin()).powi(2))
                .sum();
            (grid.period() * sum).sqrt()
        })
        .fold(0.0, f64::max)
}

fn tag_delta(err: Error, delta: f64) -> Error {
    match err {
        Error::Divergence { time, reason } => Error::Divergence {
            time,
            reason: format!("delta = {delta}: {reason}"),
        },
        other => other,
    }
}

fn check_sobolev(s: f64) -> Result<()> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::config(format!("Sobolev index must be finite and nonnegative, got {s}")));
    }
    Ok(())
}

/// ILW against BO from the same data: `E(δ) = sup_t ‖u_δ(t) − u_BO(t)‖_{Hˢ}`.
///
/// `δ = ∞` is accepted as a sentinel; `linear` drops the quadratic term and
/// adds the closed-form metric `closed_form`.
pub fn deep_water(
    u0: &SpectralField,
    s: f64,
    deltas: &[f64],
    solver: &SolverParams,
    linear: bool,
) -> Result<ExperimentReport> {
    check_sobolev(s)?;
    if deltas.is_empty() {
        return Err(Error::config("delta grid is empty"));
    }
    if deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::config("delta grid must be positive"));
    }
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("delta grid must be strictly increasing"));
    }
    if !(s > s0() && s < 0.5) {
        log::warn!("deep_water: s = {s} lies outside ({:.4}, 1/2)", s0());
    }
    let (ilw, bo) = if linear { ("ilw_linear", "bo_linear") } else { ("ilw", "bo") };
    let reference = evolve(u0, &solver.config(u0, bo, None))?;
    let errors = deltas
        .par_iter()
        .map(|&d| {
            let traj = evolve(u0, &solver.config(u0, ilw, Some(d))).map_err(|e| tag_delta(e, d))?;
            sup_difference(&traj, &reference, s)
        })
        .collect::<Result<Vec<f64>>>()?;

    let provenance = Provenance::new(
        0,
        json!({
            "s": s,
            "deltas": deltas.iter().map(|d| ext(*d)).collect::<Vec<_>>(),
            "solver": solver,
            "linear": linear,
            "n_modes": u0.grid().n_modes(),
        }),
    );
    let mut report = ExperimentReport::new("deepwater", "delta", deltas.to_vec(), provenance);
    report.metrics.insert("error".into(), errors);
    let n_finite = deltas.iter().filter(|d| d.is_finite()).count();
    if n_finite >= 2 {
        report.criteria.push(Criterion::new(
            "error strictly decreasing in delta",
            Check::StrictlyDecreasing { metric: "error".into() },
        ));
        report.criteria.push(Criterion::new(
            "E(last) <= E(first)/10",
            Check::LastOverFirstAtMost {
                metric: "error".into(),
                factor: 0.1,
            },
        ));
        let finite: Vec<(f64, f64)> = deltas
            .iter()
            .zip(&report.metrics["error"])
            .filter(|(d, _)| d.is_finite())
            .map(|(d, e)| (*d, *e))
            .collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = finite.into_iter().unzip();
        let slope = fit_slope(&xs, &ys);
        if slope.is_finite() {
            report.slopes.insert("error".into(), slope);
        }
    }
    if n_finite < deltas.len() {
        report.criteria.push(Criterion::new(
            "delta = inf sentinel",
            Check::SentinelAtMost {
                metric: "error".into(),
                bound: 1e-10,
            },
        ));
    }
    if linear {
        let closed = deltas
            .iter()
            .map(|&d| linear_closed_form(u0, s, &reference.times, |xi| deep_water_gap(xi, d)))
            .collect();
        report.metrics.insert("closed_form".into(), closed);
        report.criteria.push(Criterion::new(
            "matches closed form",
            Check::AgreeWithin {
                a: "error".into(),
                b: "closed_form".into(),
                bound: 1e-10,
            },
        ));
    }
    report.finalize()
}

/// sILW against `∂ₜv + ⅓∂ₓ³v = ∂ₓ(v²)`; the grid must decrease toward 0.
pub fn shallow_water(
    u0: &SpectralField,
    s: f64,
    deltas: &[f64],
    solver: &SolverParams,
    linear: bool,
) -> Result<ExperimentReport> {
    check_sobolev(s)?;
    if deltas.len() < 2 {
        return Err(Error::config("shallow-water grid needs at least two values of delta"));
    }
    if deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::config("delta grid must be positive and finite"));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::config("delta grid must be strictly decreasing"));
    }
    let (silw, kdv) = if linear {
        ("silw_linear", "kdv_third_linear")
    } else {
        ("silw", "kdv_third")
    };
    let reference = evolve(u0, &solver.config(u0, kdv, None))?;
    let errors = deltas
        .par_iter()
        .map(|&d| {
            let traj = evolve(u0, &solver.config(u0, silw, Some(d))).map_err(|e| tag_delta(e, d))?;
            sup_difference(&traj, &reference, s)
        })
        .collect::<Result<Vec<f64>>>()?;
    let slope = fit_slope(deltas, &errors);

    let provenance = Provenance::new(
        0,
        json!({
            "s": s,
            "deltas": deltas,
            "solver": solver,
            "linear": linear,
            "n_modes": u0.grid().n_modes(),
        }),
    );
    let mut report = ExperimentReport::new("shallowwater", "delta", deltas.to_vec(), provenance);
    report.metrics.insert("error".into(), errors);
    if slope.is_finite() {
        report.slopes.insert("error".into(), slope);
    }
    report.criteria.push(Criterion::new(
        "error strictly decreasing as delta -> 0",
        Check::StrictlyDecreasing { metric: "error".into() },
    ));
    let (lo, hi) = if linear { (1.7, 2.3) } else { (1.5, 2.5) };
    report.criteria.push(Criterion::new(
        "log-log slope",
        Check::SlopeInRange {
            slope: "error".into(),
            lo,
            hi,
        },
    ));
    if linear {
        let closed = deltas
            .iter()
            .map(|&d| linear_closed_form(u0, s, &reference.times, |xi| shallow_water_gap(xi, d)))
            .collect();
        report.metrics.insert("closed_form".into(), closed);
        report.criteria.push(Criterion::new(
            "matches closed form",
            Check::AgreeWithin {
                a: "error".into(),
                b: "closed_form".into(),
                bound: 1e-10,
            },
        ));
    }
    report.finalize()
}

/// Two discretizations of the same equation from the same data: step `dt`
/// with 2/3 truncation against step `dt/2` with 3/2 padding. Reports the sup
/// over common snapshots of their `Hˢ` distance.
pub fn twin_solver(
    u0: &SpectralField,
    equation: &str,
    params: &EquationParams,
    s: f64,
    solver: &SolverParams,
) -> Result<ExperimentReport> {
    check_sobolev(s)?;
    let a = solver
        .config(u0, equation, None)
        .with_params(*params)
        .with_dealias(Dealias::TwoThirds);
    let mut b = a.clone().with_dealias(Dealias::Padded);
    b.dt = solver.dt / 2.0;
    b.snapshot_stride = 2 * solver.snapshot_stride;
    let (ta, tb) = rayon::join(|| evolve(u0, &a), || evolve(u0, &b));
    let (ta, tb) = (ta?, tb?);
    let gap = ta
        .times
        .iter()
        .zip(&tb.times)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if gap > 1e-12 {
        return Err(Error::Internal(format!("twin snapshot times differ by {gap}")));
    }
    let error = sup_difference(&ta, &tb, s)?;

    let provenance = Provenance::new(
        0,
        json!({
            "equation": equation,
            "params": params,
            "s": s,
            "solver": solver,
            "n_modes": u0.grid().n_modes(),
        }),
    );
    let mut report = ExperimentReport::new("twin_solver", "dt", vec![solver.dt], provenance);
    report.metrics.insert("error".into(), vec![error]);
    report.criteria.push(Criterion::new(
        "twin discretizations agree",
        Check::MaxAtMost {
            metric: "error".into(),
            bound: 1e-5,
        },
    ));
    report.finalize()
}
