use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic lattice with `n_modes` points on `[0, period)`.
///
/// The frequency lattice is `{−n/2, …, n/2 − 1}`; the physical wavenumber of
/// lattice index `k` is `2πk/period`. Coefficient arrays are stored in FFT
/// order (`0, 1, …, n/2 − 1, −n/2, …, −1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_modes: usize,
    period: f64,
}

impl Grid {
    pub const MIN_MODES: usize = 8;

    pub fn new(n_modes: usize, period: f64) -> Result<Self> {
        if !n_modes.is_multiple_of(2) {
            return Err(Error::config(format!("n_modes must be even, got {n_modes}")));
        }
        if n_modes < Self::MIN_MODES {
            return Err(Error::config(format!(
                "n_modes must be at least {}, got {n_modes}",
                Self::MIN_MODES
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::config(format!("period must be positive, got {period}")));
        }
        Ok(Self { n_modes, period })
    }

    /// `n_modes` points on the standard torus `[0, 2π)`.
    pub fn periodic(n_modes: usize) -> Result<Self> {
        Self::new(n_modes, 2.0 * PI)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n_modes as f64
    }

    /// Scale between lattice index and physical wavenumber.
    pub fn frequency_scale(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn is_standard_torus(&self) -> bool {
        (self.period - 2.0 * PI).abs() <= 1e-12 * 2.0 * PI
    }

    pub fn min_index(&self) -> i64 {
        -(self.n_modes as i64) / 2
    }

    pub fn max_index(&self) -> i64 {
        self.n_modes as i64 / 2 - 1
    }

    /// The unpaired lattice index `−n/2`.
    pub fn nyquist_index(&self) -> i64 {
        self.min_index()
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.min_index() && n <= self.max_index()
    }

    /// Storage slot of lattice index `n`.
    pub fn slot(&self, n: i64) -> Option<usize> {
        if !self.contains(n) {
            return None;
        }
        let len = self.n_modes as i64;
        Some(n.rem_euclid(len) as usize)
    }

    /// Lattice index stored at `slot`.
    pub fn index_at(&self, slot: usize) -> i64 {
        let half = self.n_modes / 2;
        if slot < half {
            slot as i64
        } else {
            slot as i64 - self.n_modes as i64
        }
    }

    /// Physical wavenumber stored at `slot`.
    pub fn wavenumber_at(&self, slot: usize) -> f64 {
        self.index_at(slot) as f64 * self.frequency_scale()
    }

    /// Lattice indices in ascending order.
    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.min_index()..=self.max_index()
    }

    /// Physical wavenumbers in FFT storage order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n_modes).map(|k| self.wavenumber_at(k)).collect()
    }

    /// Sample points `x_j = j·h`.
    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_modes).map(|j| j as f64 * h).collect()
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::shape(format!(
                "grid mismatch: ({}, {}) vs ({}, {})",
                self.n_modes, self.period, other.n_modes, other.period
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_grid() {
        let g = Grid::new(64, 2.0 * PI).unwrap();
        assert!((g.spacing() - 2.0 * PI / 64.0).abs() < 1e-15);
        assert_eq!(g.min_index(), -32);
        assert_eq!(g.max_index(), 31);
        assert!(g.contains(0));
        let idx: Vec<i64> = g.indices().collect();
        assert_eq!(idx.len(), 64);
    }

    #[test]
    fn odd_or_small_rejected() {
        assert!(matches!(Grid::new(63, 2.0 * PI), Err(Error::Config(_))));
        assert!(matches!(Grid::new(6, 2.0 * PI), Err(Error::Config(_))));
        assert!(matches!(Grid::new(8, 0.0), Err(Error::Config(_))));
        assert!(matches!(Grid::new(8, -1.0), Err(Error::Config(_))));
    }

    #[test]
    fn scaled_lattice() {
        let g = Grid::new(8, 4.0 * PI).unwrap();
        let mut xi: Vec<f64> = g.wavenumbers();
        xi.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5];
        for (a, b) in xi.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn slots_roundtrip() {
        let g = Grid::periodic(16).unwrap();
        for n in g.indices() {
            let s = g.slot(n).unwrap();
            assert_eq!(g.index_at(s), n);
        }
        assert_eq!(g.slot(8), None);
        assert_eq!(g.slot(-8), Some(8));
    }
}
