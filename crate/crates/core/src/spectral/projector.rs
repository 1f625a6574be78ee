use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpectralField;
use crate::error::{Error, Result};

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth cutoff: 1 on `[−1, 1]`, 0 outside `(−2, 2)`, values in `[0, 1]`.
pub fn psi(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let num = bump(2.0 - a);
    num / (num + bump(a - 1.0))
}

/// Littlewood–Paley shell `ψ_N(ξ) = ψ(ξ/N) − ψ(2ξ/N)`.
pub fn psi_dyadic(xi: f64, n: f64) -> f64 {
    psi(xi / n) - psi(2.0 * xi / n)
}

/// Frequency projections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Projection {
    /// `P_N`, multiplier `ψ_N`.
    Dyadic { n: u64 },
    /// `P_{≤N}`, multiplier `ψ(·/N)`.
    Leq { n: u64 },
    /// `ξ > 0`
    Plus,
    /// `ξ < 0`
    Minus,
    /// `P_{≤1}`
    Lo,
    /// `1 − P_lo`
    Hi,
    /// `P₊P_hi`
    PlusHi,
    /// Constant mode (the mean).
    ZeroMode,
}

impl Projection {
    /// Multiplier at physical wavenumber `xi`.
    pub fn weight(&self, xi: f64) -> Result<f64> {
        Ok(match *self {
            Projection::Dyadic { n } => psi_dyadic(xi, dyadic(n)?),
            Projection::Leq { n } => psi(xi / dyadic(n)?),
            Projection::Plus => f64::from(xi > 0.0),
            Projection::Minus => f64::from(xi < 0.0),
            Projection::Lo => psi(xi),
            Projection::Hi => 1.0 - psi(xi),
            Projection::PlusHi => f64::from(xi > 0.0) * (1.0 - psi(xi)),
            Projection::ZeroMode => f64::from(xi == 0.0),
        })
    }
}

fn dyadic(n: u64) -> Result<f64> {
    if n.is_power_of_two() {
        Ok(n as f64)
    } else {
        Err(Error::config(format!("dyadic scale must be a power of two, got {n}")))
    }
}

pub fn project(field: &SpectralField, kind: Projection) -> Result<SpectralField> {
    let grid = *field.grid();
    kind.weight(0.0)?;
    let nyq = grid.nyquist_index();
    let scale = grid.frequency_scale();
    // Sign-selective projections break Hermitian symmetry; the even ones keep it.
    let even = !matches!(kind, Projection::Plus | Projection::Minus | Projection::PlusHi);
    let out = field.map_coeffs(field.is_real() && even, |n, c| {
        let xi = n as f64 * scale;
        let w = kind.weight(xi).expect("validated above");
        // Even projections act on the Nyquist mode as on its missing partner.
        if n == nyq && !even {
            return Complex64::new(0.0, 0.0);
        }
        c * w
    });
    Ok(out)
}
