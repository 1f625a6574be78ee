use num_complex::Complex64;

use super::config::Trajectory;
use crate::error::{Error, Result};
use crate::spectral::{norm, Norm, SpectralField};

/// Moving frame `v(t,x) = u(t, x + t/δ)`: `cₙ ↦ e^{iξt/δ}cₙ`.
///
/// `delta = ∞` is the identity. On the Nyquist mode only the real part of
/// the phase is kept so that real fields stay real.
pub fn galilean_conjugate(field: &SpectralField, t: f64, delta: f64) -> Result<SpectralField> {
    if !(delta > 0.0) {
        return Err(Error::config(format!("delta must be positive, got {delta}")));
    }
    if t == 0.0 || delta.is_infinite() {
        return Ok(field.clone());
    }
    let grid = *field.grid();
    let nyq = grid.nyquist_index();
    let k = grid.frequency_scale();
    Ok(field.map_coeffs(field.is_real(), |n, c| {
        let theta = n as f64 * k * t / delta;
        if n == nyq {
            c * theta.cos()
        } else {
            c * Complex64::from_polar(1.0, theta)
        }
    }))
}

/// Conjugates each snapshot of an `ilw` trajectory at its own time.
///
/// The returned trajectory is labelled `bo_perturbed`, the equation the
/// conjugated states solve.
pub fn galilean_conjugate_trajectory(traj: &Trajectory) -> Result<Trajectory> {
    let delta = traj.config.params.require_delta(&traj.config.equation)?;
    let states = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| galilean_conjugate(s, t, delta))
        .collect::<Result<Vec<_>>>()?;
    let mut config = traj.config.clone();
    config.equation = "bo_perturbed".into();
    Ok(Trajectory {
        config,
        times: traj.times.clone(),
        states,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub times: Vec<f64>,
    pub means: Vec<f64>,
    pub l2_norms: Vec<f64>,
    /// `max |mean(t) − mean(0)|`.
    pub mean_drift: f64,
    /// `max |‖u(t)‖ − ‖u(0)‖| / ‖u(0)‖`, or the absolute drift when `u(0) = 0`.
    pub l2_relative_drift: f64,
}

pub fn invariant_report(traj: &Trajectory) -> Result<InvariantReport> {
    if traj.is_empty() {
        return Err(Error::precondition("empty trajectory"));
    }
    let means: Vec<f64> = traj.states.iter().map(SpectralField::mean).collect();
    let l2_norms = traj
        .states
        .iter()
        .map(|s| norm(s, Norm::L2))
        .collect::<Result<Vec<_>>>()?;
    let mean_drift = means.iter().map(|m| (m - means[0]).abs()).fold(0.0, f64::max);
    let scale = if l2_norms[0] > 0.0 { l2_norms[0] } else { 1.0 };
    let l2_relative_drift = l2_norms
        .iter()
        .map(|n| (n - l2_norms[0]).abs() / scale)
        .fold(0.0, f64::max);
    Ok(InvariantReport {
        times: traj.times.clone(),
        means,
        l2_norms,
        mean_drift,
        l2_relative_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve, EvolutionConfig};
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn conjugation_examples() {
        let grid = Grid::periodic(16).unwrap();
        let u = SpectralField::from_real_fn(grid, f64::cos);
        assert_eq!(galilean_conjugate(&u, 0.0, 2.0).unwrap(), u);
        let v = galilean_conjugate(&u, PI * 2.0, 2.0).unwrap();
        assert!(v.max_abs_diff(&u.scale(-1.0)).unwrap() < 1e-14);
        assert!(v.is_real());
        let z = SpectralField::from_modes(grid, &[(2, Complex64::new(1.0, 0.0))]).unwrap();
        let w = galilean_conjugate(&z, 3.0, 3.0).unwrap();
        assert!((w.coeff(2) - Complex64::from_polar(1.0, 2.0)).norm() < 1e-14);
        assert!(galilean_conjugate(&u, 1.0, 0.0).is_err());
    }

    #[test]
    fn mean_and_l2_are_conserved() {
        let grid = Grid::periodic(64).unwrap();
        let u0 = SpectralField::from_real_fn(grid, f64::cos);
        let cfg = EvolutionConfig::new("ilw", grid, 1e-3, 1.0).with_delta(1.0).with_stride(100);
        let rep = invariant_report(&evolve(&u0, &cfg).unwrap()).unwrap();
        assert!(rep.mean_drift <= 1e-13);
        assert!(rep.l2_relative_drift <= 1e-8, "{}", rep.l2_relative_drift);
    }

    #[test]
    fn constant_is_stationary_under_bo() {
        let grid = Grid::periodic(16).unwrap();
        let u0 = SpectralField::from_real_fn(grid, |_| 0.7);
        let cfg = EvolutionConfig::new("bo", grid, 0.01, 1.0);
        let traj = evolve(&u0, &cfg).unwrap();
        assert!(traj.last().unwrap().1.max_abs_diff(&u0).unwrap() < 1e-14);
    }
}
