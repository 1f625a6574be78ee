use serde::{Deserialize, Serialize};

use super::special::jbracket_pow;
use super::SpectralField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum Norm {
    L2,
    Linf,
    Lp { p: f64 },
    Hs { s: f64 },
}

/// `Hs(s) = (L·Σ⟨ξ⟩^{2s}|cₙ|²)^{1/2}`; `Lp` by the rectangle rule on the samples.
pub fn norm(field: &SpectralField, space: Norm) -> Result<f64> {
    match space {
        Norm::L2 => Ok(sobolev(field, 0.0)),
        Norm::Hs { s } => {
            if !s.is_finite() {
                return Err(Error::config(format!("Sobolev index must be finite, got {s}")));
            }
            Ok(sobolev(field, s))
        }
        Norm::Linf => Ok(field
            .to_complex_samples()
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)),
        Norm::Lp { p } => {
            if p.is_infinite() && p > 0.0 {
                return norm(field, Norm::Linf);
            }
            if !(p >= 1.0) {
                return Err(Error::config(format!("p must lie in [1, ∞], got {p}")));
            }
            let h = field.grid().spacing();
            let sum: f64 = field
                .to_complex_samples()
                .iter()
                .map(|c| c.norm().powf(p))
                .sum();
            Ok((h * sum).powf(1.0 / p))
        }
    }
}

fn sobolev(field: &SpectralField, s: f64) -> f64 {
    let grid = field.grid();
    let sum: f64 = field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| jbracket_pow(grid.wavenumber_at(k), 2.0 * s) * c.norm_sqr())
        .sum();
    (grid.period() * sum).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn cosine_norms() {
        let g = Grid::periodic(64).unwrap();
        let f = SpectralField::from_real_fn(g, f64::cos);
        assert!((norm(&f, Norm::L2).unwrap() - PI.sqrt()).abs() < 1e-12);
        assert!((norm(&f, Norm::Hs { s: 1.0 }).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((norm(&f, Norm::Lp { p: 2.0 }).unwrap() - PI.sqrt()).abs() < 1e-12);
        assert!((norm(&f, Norm::Linf).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field() {
        let f = SpectralField::zeros(Grid::periodic(16).unwrap());
        for space in [Norm::L2, Norm::Linf, Norm::Lp { p: 3.0 }, Norm::Hs { s: -1.0 }] {
            assert_eq!(norm(&f, space).unwrap(), 0.0);
        }
    }

    #[test]
    fn bad_exponent() {
        let f = SpectralField::zeros(Grid::periodic(16).unwrap());
        assert!(norm(&f, Norm::Lp { p: 0.5 }).is_err());
        assert_eq!(norm(&f, Norm::Lp { p: f64::INFINITY }).unwrap(), 0.0);
    }
}
