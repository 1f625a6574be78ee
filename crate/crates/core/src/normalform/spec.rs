use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{psi_dyadic, Grid};

/// Optional Littlewood–Paley restrictions; `None` means the factor is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Shells {
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    pub n3: Option<u64>,
    pub n12: Option<u64>,
    pub n23: Option<u64>,
}

impl Shells {
    pub(crate) fn factor(shell: Option<u64>, xi: i64) -> f64 {
        shell.map_or(1.0, |n| psi_dyadic(xi as f64, n as f64))
    }

    fn all(&self) -> [Option<u64>; 5] {
        [self.n1, self.n2, self.n3, self.n12, self.n23]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalFormSpec {
    /// Resonance threshold `M`.
    pub m: f64,
    pub s: f64,
    pub theta: f64,
    pub grid: Grid,
    #[serde(default)]
    pub shells: Shells,
    /// Time in the oscillatory factors `e^{−itΩ}`.
    #[serde(default)]
    pub t: f64,
}

impl NormalFormSpec {
    pub fn new(grid: Grid, m: f64) -> Self {
        Self {
            m,
            s: 0.0,
            theta: 0.0,
            grid,
            shells: Shells::default(),
            t: 0.0,
        }
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn with_shells(mut self, shells: Shells) -> Self {
        self.shells = shells;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 1.0) {
            return Err(Error::config(format!("M must be at least 1, got {}", self.m)));
        }
        if !(self.theta >= 0.0) {
            return Err(Error::config(format!("theta must be nonnegative, got {}", self.theta)));
        }
        if !self.grid.is_standard_torus() {
            return Err(Error::config(
                "normal-form operators live on the integer lattice: period must be 2π",
            ));
        }
        let half = self.grid.n_modes() as u64 / 2;
        for n in self.shells.all().into_iter().flatten() {
            if !n.is_power_of_two() || n > half {
                return Err(Error::config(format!(
                    "shell {n} must be a power of two not exceeding n_modes/2 = {half}"
                )));
            }
        }
        Ok(())
    }
}
