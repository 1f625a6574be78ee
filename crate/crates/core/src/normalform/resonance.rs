use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Ω(ξ,ξ₁,ξ₂) = ξ|ξ| − ξ₁|ξ₁| − ξ₂|ξ₂|` (no constraint imposed).
pub fn omega(xi: i64, xi1: i64, xi2: i64) -> i64 {
    xi * xi.abs() - xi1 * xi1.abs() - xi2 * xi2.abs()
}

/// `Ω⁽²⁾₁ = Ω(ξ,ξ₁₂,ξ₃) + Ω(ξ₁₂,ξ₁,ξ₂)`.
pub(crate) fn omega2_1(xi: i64, xi1: i64, xi2: i64, xi3: i64) -> i64 {
    let xi12 = xi1 + xi2;
    omega(xi, xi12, xi3) + omega(xi12, xi1, xi2)
}

/// `Ω⁽²⁾₂ = Ω(ξ,ξ₁,ξ₂₃) + Ω(ξ₂₃,ξ₂,ξ₃)`.
pub(crate) fn omega2_2(xi: i64, xi1: i64, xi2: i64, xi3: i64) -> i64 {
    let xi23 = xi2 + xi3;
    omega(xi, xi1, xi23) + omega(xi23, xi2, xi3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceKind {
    Omega,
    Omega2_1,
    Omega2_2,
}

/// Resonance function on `[ξ, ξ₁, ξ₂]` or `[ξ, ξ₁, ξ₂, ξ₃]`, which must add up.
pub fn resonance(kind: ResonanceKind, freqs: &[i64]) -> Result<i64> {
    let arity = match kind {
        ResonanceKind::Omega => 3,
        _ => 4,
    };
    if freqs.len() != arity {
        return Err(Error::shape(format!("{kind:?} takes {arity} frequencies, got {}", freqs.len())));
    }
    let sum: i64 = freqs[1..].iter().sum();
    if sum != freqs[0] {
        return Err(Error::precondition(format!(
            "frequencies {freqs:?} violate ξ = Σξⱼ"
        )));
    }
    Ok(match kind {
        ResonanceKind::Omega => omega(freqs[0], freqs[1], freqs[2]),
        ResonanceKind::Omega2_1 => omega2_1(freqs[0], freqs[1], freqs[2], freqs[3]),
        ResonanceKind::Omega2_2 => omega2_2(freqs[0], freqs[1], freqs[2], freqs[3]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(resonance(ResonanceKind::Omega, &[1, 2, -1]).unwrap(), -2);
        assert_eq!(resonance(ResonanceKind::Omega, &[5, 5, 0]).unwrap(), 0);
        assert_eq!(resonance(ResonanceKind::Omega2_1, &[1, 3, -2, 0]).unwrap(), -4);
        assert!(matches!(
            resonance(ResonanceKind::Omega, &[1, 2, 2]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn closed_forms_on_the_sigma_support() {
        for xi in 1..12 {
            for xi2 in -12..0 {
                assert_eq!(omega(xi, xi - xi2, xi2), 2 * xi * xi2);
            }
        }
        // Both second-generation phases telescope to the full four-wave phase.
        for (a, b, c) in [(3i64, -2i64, -1i64), (5, 1, -7), (2, -4, 3)] {
            let xi = a + b + c;
            let full = xi * xi.abs() - a * a.abs() - b * b.abs() - c * c.abs();
            assert_eq!(omega2_1(xi, a, b, c), full);
            assert_eq!(omega2_2(xi, a, b, c), full);
        }
        // On σ(ξ,ξ₁₂,ξ₃)σ(ξ₁₂,ξ₁,ξ₂): 2ξξ₃ + 2ξ₁₂ξ₂.
        let (xi1, xi2, xi3) = (6, -2, -3);
        let xi = xi1 + xi2 + xi3;
        assert_eq!(omega2_1(xi, xi1, xi2, xi3), 2 * xi * xi3 + 2 * (xi1 + xi2) * xi2);
    }
}
