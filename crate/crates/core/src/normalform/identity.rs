use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operators::{bilinear_nf, sigma, BilinearVariant};
use super::resonance::omega;
use super::spec::NormalFormSpec;
use crate::error::{Error, Result};
use crate::spectral::{norm, Norm, SpectralField};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Time quadrature for the integrals of the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    /// Trapezoid rule on the full integrands.
    Trapezoid,
    /// The phase `e^{−itΩ}` is integrated exactly against the piecewise-linear
    /// interpolant of the remaining (slowly varying) amplitude.
    #[default]
    Filon,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NfIdentity {
    /// `‖mismatch‖_{L²} / ‖boundary term‖_{L²}`.
    pub residual: f64,
    pub mismatch_norm: f64,
    pub boundary_norm: f64,
    pub quadrature: Quadrature,
}

/// `e^{−itξ|ξ|}f`, the profile with the BO linear flow removed.
pub fn interaction_picture(f: &SpectralField, t: f64) -> SpectralField {
    let k = f.grid().frequency_scale();
    f.map_coeffs(false, |n, c| {
        let xi = n as f64 * k;
        c * Complex64::from_polar(1.0, -t * xi * xi.abs())
    })
}

/// `∫₀ᴸ uⁿ e^{iφu} du` for `n = 0, 1, 2`.
fn moments(phi: f64, len: f64) -> [Complex64; 3] {
    let i = Complex64::new(0.0, 1.0);
    if (phi * len).abs() < 1.0 {
        // Σ_k (iφ)^k/k! · L^{n+k+1}/(n+k+1)
        let mut out = [ZERO; 3];
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..40 {
            for (n, o) in out.iter_mut().enumerate() {
                *o += term * len.powi((n + k + 1) as i32) / (n + k + 1) as f64;
            }
            term *= i * phi / (k + 1) as f64;
        }
        out
    } else {
        let e = Complex64::from_polar(1.0, phi * len);
        let m0 = (e - 1.0) / (i * phi);
        let m1 = (e * len - m0) / (i * phi);
        let m2 = (e * len * len - 2.0 * m1) / (i * phi);
        [m0, m1, m2]
    }
}

/// Weights `W_k` with `∫ e^{iφu} p(u) du = Σ W_k p(k)` over one interval
/// (`p` linear through nodes 0, 1) or over a panel (quadratic through 0, 1, 2).
fn filon_weights(phi: f64, quadratic: bool) -> Vec<Complex64> {
    if quadratic {
        let [m0, m1, m2] = moments(phi, 2.0);
        vec![(m2 - 3.0 * m1 + 2.0 * m0) * 0.5, 2.0 * m1 - m2, (m2 - m1) * 0.5]
    } else {
        let [m0, m1, _] = moments(phi, 1.0);
        vec![m0 - m1, m1]
    }
}

/// Checks the first normal-form identity on snapshots `w(t_j)`, `v(t_j)`:
///
/// `∫ N⁽¹⁾_{>M}(w̃,ṽ) = [N⁽¹⁾₀(w̃,ṽ)] − ∫ N⁽¹⁾₀(∂ₜw̃,ṽ) + N⁽¹⁾₀(w̃,∂ₜṽ)`
///
/// over `[t₁, t_{K−2}]`, with centered differences for `∂ₜ` and `M = spec.m`.
/// `spec.t` is ignored: each snapshot uses its own time in the phases.
pub fn nf_identity_residual(
    times: &[f64],
    w: &[SpectralField],
    v: &[SpectralField],
    spec: &NormalFormSpec,
    quadrature: Quadrature,
) -> Result<NfIdentity> {
    spec.validate()?;
    let k = times.len();
    if k < 3 {
        return Err(Error::precondition("the identity check needs at least 3 snapshots"));
    }
    if w.len() != k || v.len() != k {
        return Err(Error::shape(format!(
            "{k} times but {} w and {} v snapshots",
            w.len(),
            v.len()
        )));
    }
    let wt: Vec<SpectralField> = times.iter().zip(w).map(|(&t, f)| interaction_picture(f, t)).collect();
    let vt: Vec<SpectralField> = times.iter().zip(v).map(|(&t, f)| interaction_picture(f, t)).collect();
    let centered = |fs: &[SpectralField], j: usize| -> Result<SpectralField> {
        fs[j + 1].sub(&fs[j - 1]).map(|d| d.scale(1.0 / (times[j + 1] - times[j - 1])))
    };
    let dw: Vec<SpectralField> = (1..k - 1).map(|j| centered(&wt, j)).collect::<Result<_>>()?;
    let dv: Vec<SpectralField> = (1..k - 1).map(|j| centered(&vt, j)).collect::<Result<_>>()?;
    identity_mismatch(times, &wt, &vt, &dw, &dv, spec, quadrature)
}

/// Both sides of the identity on interaction-picture snapshots `wt`, `vt`,
/// given their time derivatives `dw`, `dv` at the interior snapshots `1..K−1`.
pub fn identity_mismatch(
    times: &[f64],
    wt: &[SpectralField],
    vt: &[SpectralField],
    dw: &[SpectralField],
    dv: &[SpectralField],
    spec: &NormalFormSpec,
    quadrature: Quadrature,
) -> Result<NfIdentity> {
    let k = times.len();
    let at = |j: usize| spec.with_time(times[j]);
    let (first, last) = (1, k - 2);
    let boundary = bilinear_nf(BilinearVariant::Zero, &wt[last], &vt[last], &at(last))?.sub(&bilinear_nf(
        BilinearVariant::Zero,
        &wt[first],
        &vt[first],
        &at(first),
    )?)?;

    let (lhs, dterm) = match quadrature {
        Quadrature::Trapezoid => {
            let grid = spec.grid;
            let mut lhs = SpectralField::zeros(grid);
            let mut dterm = SpectralField::zeros(grid);
            for j in first..=last {
                let weight = 0.5
                    * (if j > first { times[j] - times[j - 1] } else { 0.0 }
                        + if j < last { times[j + 1] - times[j] } else { 0.0 });
                let s = at(j);
                lhs = lhs.axpy(weight, &bilinear_nf(BilinearVariant::GtM, &wt[j], &vt[j], &s)?)?;
                let d = bilinear_nf(BilinearVariant::Zero, &dw[j - first], &vt[j], &s)?
                    .add(&bilinear_nf(BilinearVariant::Zero, &wt[j], &dv[j - first], &s)?)?;
                dterm = dterm.axpy(weight, &d)?;
            }
            (lhs, dterm)
        }
        Quadrature::Filon => filon_integrals(times, wt, vt, dw, dv, first, last, spec)?,
    };
    let mismatch = lhs.sub(&boundary)?.add(&dterm)?;
    let mismatch_norm = norm(&mismatch, Norm::L2)?;
    let boundary_norm = norm(&boundary, Norm::L2)?;
    let residual = if boundary_norm > 0.0 {
        mismatch_norm / boundary_norm
    } else {
        mismatch_norm
    };
    Ok(NfIdentity {
        residual,
        mismatch_norm,
        boundary_norm,
        quadrature,
    })
}

#[allow(clippy::too_many_arguments)]
fn filon_integrals(
    times: &[f64],
    wt: &[SpectralField],
    vt: &[SpectralField],
    dw: &[SpectralField],
    dv: &[SpectralField],
    first: usize,
    last: usize,
    spec: &NormalFormSpec,
) -> Result<(SpectralField, SpectralField)> {
    let grid = spec.grid;
    let n = grid.n_modes();
    let mut lhs = vec![ZERO; n];
    let mut dterm = vec![ZERO; n];
    let lo = grid.min_index();
    let hi = grid.max_index();
    for xi1 in 1..=hi {
        for xi2 in lo..=-1 {
            let xi = xi1 + xi2;
            let Some(slot) = grid.slot(xi) else { continue };
            if !sigma(xi, xi1, xi2) {
                continue;
            }
            let om = omega(xi, xi1, xi2);
            if (om.abs() as f64) <= spec.m {
                continue;
            }
            let gt = Complex64::new(0.0, -2.0 * (xi * xi2) as f64 / xi1 as f64);
            let zero = 1.0 / xi1 as f64;
            let amp_a = |j: usize| gt * wt[j].coeff(xi1) * vt[j].coeff(xi2);
            let amp_d = |j: usize| {
                let r = j - first;
                (dw[r].coeff(xi1) * vt[j].coeff(xi2) + wt[j].coeff(xi1) * dv[r].coeff(xi2)) * zero
            };
            let (mut acc_a, mut acc_d) = (ZERO, ZERO);
            let mut j = first;
            while j < last {
                let quadratic = j + 2 <= last;
                let h = times[j + 1] - times[j];
                let weights = filon_weights(-(om as f64) * h, quadratic);
                let ph = Complex64::from_polar(h, -(om as f64) * times[j]);
                for (r, wk) in weights.iter().enumerate() {
                    acc_a += ph * wk * amp_a(j + r);
                    acc_d += ph * wk * amp_d(j + r);
                }
                j += weights.len() - 1;
            }
            lhs[slot] += acc_a;
            dterm[slot] += acc_d;
        }
    }
    Ok((
        SpectralField::from_coeffs_flagged(grid, lhs, false),
        SpectralField::from_coeffs_flagged(grid, dterm, false),
    ))
}
