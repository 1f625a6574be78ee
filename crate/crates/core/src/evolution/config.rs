use serde::{Deserialize, Serialize};

use super::equation::{EquationParams, EquationRegistry, LinearModel};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};
use std::sync::Arc;

/// Treatment of aliasing in the quadratic term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    /// Plain collocation product.
    Off,
    /// Keep `|n| < n_modes/3` (Orszag's 2/3 rule).
    #[default]
    TwoThirds,
    /// Evaluate the product on a grid padded by 3/2 and truncate.
    Padded,
}

impl From<bool> for Dealias {
    fn from(on: bool) -> Self {
        if on {
            Dealias::TwoThirds
        } else {
            Dealias::Off
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub equation: String,
    pub params: EquationParams,
    pub grid: Grid,
    pub dt: f64,
    pub t_final: f64,
    pub dealias: Dealias,
    pub snapshot_stride: usize,
}

impl EvolutionConfig {
    pub fn new(equation: impl Into<String>, grid: Grid, dt: f64, t_final: f64) -> Self {
        Self {
            equation: equation.into(),
            params: EquationParams::default(),
            grid,
            dt,
            t_final,
            dealias: Dealias::default(),
            snapshot_stride: 1,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.params.delta = Some(delta);
        self
    }

    pub fn with_params(mut self, params: EquationParams) -> Self {
        self.params = params;
        self
    }

    pub fn with_dealias(mut self, dealias: Dealias) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::config(format!("t_final must be positive, got {}", self.t_final)));
        }
        if self.dt > self.t_final {
            return Err(Error::config(format!(
                "dt = {} exceeds t_final = {}",
                self.dt, self.t_final
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::config("snapshot_stride must be positive"));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<Arc<dyn LinearModel>> {
        EquationRegistry::global().build(&self.equation, &self.params)
    }

    /// Number of steps and the step actually taken (`≤ dt`, landing on `t_final`).
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

/// Snapshots of a run at `k·stride·dt` for `k = 0, 1, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub config: EvolutionConfig,
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &SpectralField)> {
        self.times.last().copied().zip(self.states.last())
    }

    /// Snapshot interval.
    pub fn spacing(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }
}
