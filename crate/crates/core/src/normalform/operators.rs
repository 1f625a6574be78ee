use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::resonance::{omega, omega2_1, omega2_2};
use super::spec::{NormalFormSpec, Shells};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BilinearVariant {
    /// `N⁽¹⁾`, kernel `−2i(ξξ₂/ξ₁)σ`.
    Full,
    /// `N⁽¹⁾_{≤M}`
    LeqM,
    /// `N⁽¹⁾_{>M}`
    GtM,
    /// `N⁽¹⁾₀`, kernel `(1/ξ₁)1_{|Ω|>M}σ`.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrilinearVariant {
    /// `N⁽²⁾₁` with symbol `m⁽²⁾₁`.
    N2_1,
    /// `N⁽²⁾_{≤M}`: `−i·m⁽²⁾_*` on `{|ξ₁₂| ≤ 1} ∪ {|Ω⁽²⁾₂| ≤ M}`.
    N2LeqM,
    /// `N⁽²⁾₂`: `−i·m⁽²⁾_*` on the complement.
    N2_2,
    /// `N⁽²⁾_{j,0}`: symbol `m⁽²⁾_j/(−iΩ⁽²⁾_j)`, `j ∈ {1, 2}`.
    N2_0 { j: u8 },
}

pub(crate) fn sigma(xi: i64, xi1: i64, xi2: i64) -> bool {
    xi >= 1 && xi1 >= 1 && xi2 <= -1
}

fn phase(t: f64, omega: i64) -> Complex64 {
    if t == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -t * omega as f64)
    }
}

/// Kernel of the bilinear variants, phase included; `None` off the support.
fn bilinear_kernel(variant: BilinearVariant, xi1: i64, xi2: i64, m: f64, t: f64) -> Option<Complex64> {
    let xi = xi1 + xi2;
    if !sigma(xi, xi1, xi2) {
        return None;
    }
    let om = omega(xi, xi1, xi2);
    let resonant = (om.abs() as f64) <= m;
    let full = || -2.0 * I * ((xi * xi2) as f64 / xi1 as f64);
    let k = match variant {
        BilinearVariant::Full => full(),
        BilinearVariant::LeqM if resonant => full(),
        BilinearVariant::GtM if !resonant => full(),
        BilinearVariant::Zero if !resonant => Complex64::new(1.0 / xi1 as f64, 0.0),
        _ => return None,
    };
    Some(k * phase(t, om))
}

/// `m⁽²⁾₁` and `Ω⁽²⁾₁`, or `None` off the support.
fn m2_1(xi1: i64, xi2: i64, xi3: i64, m: f64, shells: &Shells) -> Option<(Complex64, i64)> {
    let xi12 = xi1 + xi2;
    let xi = xi12 + xi3;
    if !(sigma(xi, xi12, xi3) && sigma(xi12, xi1, xi2)) {
        return None;
    }
    if (omega(xi, xi12, xi3).abs() as f64) <= m {
        return None;
    }
    let psi = Shells::factor(shells.n12, xi12)
        * Shells::factor(shells.n1, xi1)
        * Shells::factor(shells.n2, xi2)
        * Shells::factor(shells.n3, xi3);
    let value = -2.0 * I * (xi2 as f64 / xi1 as f64) * psi;
    Some((value, omega2_1(xi, xi1, xi2, xi3)))
}

/// `m⁽²⁾_*`, `Ω⁽²⁾₂` and whether the point lies in `R⁽²⁾_{≤M}`.
fn m2_star(xi1: i64, xi2: i64, xi3: i64, m: f64, shells: &Shells) -> Option<(Complex64, i64, bool)> {
    let xi23 = xi2 + xi3;
    let xi = xi1 + xi23;
    if !sigma(xi, xi1, xi23) || (omega(xi, xi1, xi23).abs() as f64) <= m {
        return None;
    }
    let psi = Shells::factor(shells.n23, xi23)
        * Shells::factor(shells.n1, xi1)
        * Shells::factor(shells.n2, xi2)
        * Shells::factor(shells.n3, xi3);
    let om2 = omega2_2(xi, xi1, xi2, xi3);
    let low = (xi1 + xi2).abs() <= 1 || (om2.abs() as f64) <= m;
    Some((Complex64::new(xi23 as f64 / xi1 as f64 * psi, 0.0), om2, low))
}

/// `m/(−iΩ)`, refusing a vanishing phase.
pub(crate) fn divide_by_phase(m: Complex64, omega: i64, at: (i64, i64, i64)) -> Result<Complex64> {
    if omega == 0 {
        return Err(Error::Internal(format!(
            "resonance vanishes on the support at (ξ₁,ξ₂,ξ₃) = {at:?}"
        )));
    }
    Ok(m / (-I * omega as f64))
}

fn trilinear_kernel(
    variant: TrilinearVariant,
    xi1: i64,
    xi2: i64,
    xi3: i64,
    spec: &NormalFormSpec,
) -> Result<Option<Complex64>> {
    let (m, t, shells) = (spec.m, spec.t, &spec.shells);
    let at = (xi1, xi2, xi3);
    Ok(match variant {
        TrilinearVariant::N2_1 => m2_1(xi1, xi2, xi3, m, shells).map(|(v, om)| v * phase(t, om)),
        TrilinearVariant::N2_0 { j: 1 } => match m2_1(xi1, xi2, xi3, m, shells) {
            Some((v, om)) => Some(divide_by_phase(v, om, at)? * phase(t, om)),
            None => None,
        },
        TrilinearVariant::N2LeqM | TrilinearVariant::N2_2 | TrilinearVariant::N2_0 { j: 2 } => {
            match m2_star(xi1, xi2, xi3, m, shells) {
                Some((v, om, low)) => match variant {
                    TrilinearVariant::N2LeqM if low => Some(-I * v * phase(t, om)),
                    TrilinearVariant::N2_2 if !low => Some(-I * v * phase(t, om)),
                    TrilinearVariant::N2_0 { .. } if !low => Some(divide_by_phase(v, om, at)? * phase(t, om)),
                    _ => None,
                },
                None => None,
            }
        }
        TrilinearVariant::N2_0 { j } => {
            return Err(Error::config(format!("N2_0 index must be 1 or 2, got {j}")))
        }
    })
}

/// Nonzero coefficients as `(lattice index, value)`.
fn support(f: &SpectralField) -> Vec<(i64, Complex64)> {
    let grid = f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
        .map(|(k, c)| (grid.index_at(k), *c))
        .collect()
}

fn check_inputs(spec: &NormalFormSpec, fields: &[&SpectralField]) -> Result<Grid> {
    spec.validate()?;
    for f in fields {
        f.grid().check_same(&spec.grid)?;
    }
    if fields[0].grid().indices().any(|n| n <= 0 && fields[0].coeff(n) != Complex64::new(0.0, 0.0)) {
        log::warn!("normal-form input w has nonzero coefficients at ξ ≤ 0; σ discards them");
    }
    Ok(spec.grid)
}

/// `Σ_{ξ=ξ₁+ξ₂} K(ξ,ξ₁,ξ₂)·ŵ(ξ₁)v̂(ξ₂)` for the chosen variant.
pub fn bilinear_nf(
    variant: BilinearVariant,
    w: &SpectralField,
    v: &SpectralField,
    spec: &NormalFormSpec,
) -> Result<SpectralField> {
    let grid = check_inputs(spec, &[w, v])?;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.n_modes()];
    let vs = support(v);
    for (xi1, a) in support(w) {
        for &(xi2, b) in &vs {
            let Some(slot) = grid.slot(xi1 + xi2) else { continue };
            if let Some(k) = bilinear_kernel(variant, xi1, xi2, spec.m, spec.t) {
                out[slot] += k * a * b;
            }
        }
    }
    Ok(SpectralField::from_coeffs_flagged(grid, out, false))
}

/// `Σ_{ξ=ξ₁+ξ₂+ξ₃} m(ξ,ξ₁,ξ₂,ξ₃)·ŵ(ξ₁)v̂₁(ξ₂)v̂₂(ξ₃)` for the chosen variant.
pub fn trilinear_nf(
    variant: TrilinearVariant,
    w: &SpectralField,
    v1: &SpectralField,
    v2: &SpectralField,
    spec: &NormalFormSpec,
) -> Result<SpectralField> {
    let grid = check_inputs(spec, &[w, v1, v2])?;
    if let TrilinearVariant::N2_0 { j } = variant {
        if !(j == 1 || j == 2) {
            return Err(Error::config(format!("N2_0 index must be 1 or 2, got {j}")));
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); grid.n_modes()];
    let (s1, s2) = (support(v1), support(v2));
    for (xi1, a) in support(w) {
        for &(xi2, b) in &s1 {
            let ab = a * b;
            for &(xi3, c) in &s2 {
                let Some(slot) = grid.slot(xi1 + xi2 + xi3) else { continue };
                if let Some(k) = trilinear_kernel(variant, xi1, xi2, xi3, spec)? {
                    out[slot] += k * ab * c;
                }
            }
        }
    }
    Ok(SpectralField::from_coeffs_flagged(grid, out, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(grid: Grid, n: i64) -> SpectralField {
        SpectralField::from_modes(grid, &[(n, Complex64::new(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn single_term_bilinear_examples() {
        let g = Grid::periodic(16).unwrap();
        let (w, v) = (mode(g, 2), mode(g, -1));
        let spec = NormalFormSpec::new(g, 1.0);
        let full = bilinear_nf(BilinearVariant::Full, &w, &v, &spec).unwrap();
        assert!((full.coeff(1) - I).norm() < 1e-15);
        let spec = NormalFormSpec::new(g, 10.0);
        let leq = bilinear_nf(BilinearVariant::LeqM, &w, &v, &spec).unwrap();
        let gt = bilinear_nf(BilinearVariant::GtM, &w, &v, &spec).unwrap();
        assert_eq!(leq, full);
        assert_eq!(gt.max_abs(), 0.0);
        let zero = SpectralField::zeros(g);
        for variant in [BilinearVariant::Full, BilinearVariant::Zero] {
            assert_eq!(bilinear_nf(variant, &zero, &v, &spec).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn single_term_trilinear_example() {
        let g = Grid::periodic(16).unwrap();
        let spec = NormalFormSpec::new(g, 1.0);
        let out = trilinear_nf(
            TrilinearVariant::N2_0 { j: 1 },
            &mode(g, 4),
            &mode(g, -2),
            &mode(g, -1),
            &spec,
        )
        .unwrap();
        assert!((out.coeff(1) - Complex64::new(0.1, 0.0)).norm() < 1e-15);
        let empty = trilinear_nf(
            TrilinearVariant::N2_0 { j: 1 },
            &mode(g, 3),
            &mode(g, -2),
            &SpectralField::zeros(g),
            &spec,
        )
        .unwrap();
        assert_eq!(empty.max_abs(), 0.0);
    }

    #[test]
    fn vanishing_phase_is_an_internal_error() {
        assert!(matches!(
            divide_by_phase(Complex64::new(1.0, 0.0), 0, (1, -1, 1)),
            Err(Error::Internal(_))
        ));
        let q = divide_by_phase(I, -10, (4, -2, -1)).unwrap();
        assert!((q - Complex64::new(0.1, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        let g = Grid::periodic(16).unwrap();
        let f = mode(g, 1);
        assert!(bilinear_nf(BilinearVariant::Full, &f, &f, &NormalFormSpec::new(g, 0.5)).is_err());
        let shells = Shells {
            n1: Some(3),
            ..Shells::default()
        };
        let spec = NormalFormSpec::new(g, 1.0).with_shells(shells);
        assert!(matches!(
            trilinear_nf(TrilinearVariant::N2_1, &f, &f, &f, &spec),
            Err(Error::Config(_))
        ));
        let other = Grid::new(16, 1.0).unwrap();
        let h = mode(other, 1);
        assert!(bilinear_nf(BilinearVariant::Full, &h, &h, &NormalFormSpec::new(other, 1.0)).is_err());
        assert!(matches!(
            bilinear_nf(BilinearVariant::Full, &f, &mode(Grid::periodic(32).unwrap(), 1), &NormalFormSpec::new(g, 1.0)),
            Err(Error::Shape(_))
        ));
    }
}
