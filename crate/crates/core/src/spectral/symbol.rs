use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::special::{coth, coth_minus_recip, coth_minus_sign, jbracket_pow, sgn, x_coth_minus_sign};
use super::{Grid, SpectralField};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Linear flow whose propagator `e^{tℓ(ξ)}` a [`MultiplierSpec::FreePropagator`] realises.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "equation", rename_all = "snake_case")]
pub enum PropagatorTag {
    /// `ℓ = iξ²(coth(δξ) − 1/(δξ))`
    Ilw { delta: f64 },
    /// `ℓ = iξ|ξ|`
    Bo,
    /// `ℓ = iξ³`
    Kdv,
    /// `ℓ = δ⁻¹ iξ²(coth(δξ) − 1/(δξ))`
    Silw { delta: f64 },
    /// `ℓ = iξ² − im₀`, the free flow of the gauged variable.
    GaugedFree { m0: f64 },
}

impl PropagatorTag {
    pub fn generator(&self, xi: f64) -> Complex64 {
        match *self {
            PropagatorTag::Ilw { delta } => ilw_generator(xi, delta),
            PropagatorTag::Bo => bo_generator(xi),
            PropagatorTag::Kdv => I * xi.powi(3),
            PropagatorTag::Silw { delta } => ilw_generator(xi, delta) / delta,
            PropagatorTag::GaugedFree { m0 } => I * (xi * xi - m0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            PropagatorTag::Ilw { delta } | PropagatorTag::Silw { delta } => check_delta(delta),
            _ => Ok(()),
        }
    }
}

/// `iξ²(coth(δξ) − 1/(δξ))`; accepts `δ = ∞` (yields the BO symbol).
pub fn ilw_generator(xi: f64, delta: f64) -> Complex64 {
    if xi == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    I * (xi * xi * coth_minus_recip(delta * xi))
}

/// `iξ|ξ|`.
pub fn bo_generator(xi: f64) -> Complex64 {
    I * (xi * xi.abs())
}

/// A diagonal Fourier multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSpec {
    /// `−i sgn ξ`
    Hilbert,
    /// `−i coth(δξ)`, 0 at ξ = 0
    TDelta { delta: f64 },
    /// `−i(coth(δξ) − sgn ξ)`
    QDelta { delta: f64 },
    /// `−i(coth(δξ) − 1/(δξ))`
    GDelta { delta: f64 },
    /// `ξ(coth(δξ) − sgn ξ)`, `1/δ` at ξ = 0: the operator `Q_δ∂ₓ`.
    QEffective { delta: f64 },
    /// `iξ`
    Dx,
    /// `1/(iξ)`, 0 at ξ = 0
    DxInv,
    /// `⟨ξ⟩^s`
    Js { s: f64 },
    /// `e^{tℓ(ξ)}`
    FreePropagator { t: f64, tag: PropagatorTag },
}

impl MultiplierSpec {
    /// Whether `m(−ξ) = conj(m(ξ))`, i.e. real fields stay real.
    pub fn reality_preserving(&self) -> bool {
        !matches!(
            self,
            MultiplierSpec::FreePropagator {
                tag: PropagatorTag::GaugedFree { .. },
                ..
            }
        )
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MultiplierSpec::TDelta { delta }
            | MultiplierSpec::QDelta { delta }
            | MultiplierSpec::GDelta { delta }
            | MultiplierSpec::QEffective { delta } => check_delta(delta),
            MultiplierSpec::Js { s } if !s.is_finite() => {
                Err(Error::config(format!("Sobolev index must be finite, got {s}")))
            }
            MultiplierSpec::FreePropagator { t, tag } => {
                if !t.is_finite() {
                    return Err(Error::config(format!("propagator time must be finite, got {t}")));
                }
                tag.validate()
            }
            _ => Ok(()),
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 {
        Ok(())
    } else {
        Err(Error::config(format!("delta must be positive, got {delta}")))
    }
}

/// Symbol value at physical wavenumber `xi`, from the closed-form expression.
pub fn symbol_at(spec: &MultiplierSpec, xi: f64) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    match *spec {
        MultiplierSpec::Hilbert => -I * sgn(xi),
        MultiplierSpec::TDelta { delta } => {
            if xi == 0.0 {
                zero
            } else {
                -I * coth(delta * xi)
            }
        }
        MultiplierSpec::QDelta { delta } => -I * coth_minus_sign(delta * xi),
        MultiplierSpec::GDelta { delta } => -I * coth_minus_recip(delta * xi),
        MultiplierSpec::QEffective { delta } => Complex64::new(x_coth_minus_sign(delta * xi) / delta, 0.0),
        MultiplierSpec::Dx => I * xi,
        MultiplierSpec::DxInv => {
            if xi == 0.0 {
                zero
            } else {
                -I / xi
            }
        }
        MultiplierSpec::Js { s } => Complex64::new(jbracket_pow(xi, s), 0.0),
        MultiplierSpec::FreePropagator { t, tag } => (tag.generator(xi) * t).exp(),
    }
}

/// Symbol over the lattice, in FFT storage order.
///
/// The Nyquist index `−n/2` has no partner on the lattice. Reality-preserving
/// multipliers take the real part of their formula there, and propagators of
/// reality-preserving flows use the real part of their generator, so odd
/// multipliers vanish and skew propagators act as the identity on that mode.
pub fn make_symbol(spec: &MultiplierSpec, grid: &Grid) -> Result<Vec<Complex64>> {
    spec.validate()?;
    let nyq_slot = grid.slot(grid.nyquist_index()).expect("nyquist on lattice");
    let symbol = (0..grid.n_modes())
        .map(|k| {
            let xi = grid.wavenumber_at(k);
            if k == nyq_slot && spec.reality_preserving() {
                match *spec {
                    MultiplierSpec::FreePropagator { t, tag } => {
                        Complex64::new((tag.generator(xi).re * t).exp(), 0.0)
                    }
                    _ => Complex64::new(symbol_at(spec, xi).re, 0.0),
                }
            } else {
                symbol_at(spec, xi)
            }
        })
        .collect();
    Ok(symbol)
}

/// Coefficient-wise product with the symbol of `spec`.
pub fn apply_symbol(field: &SpectralField, spec: &MultiplierSpec) -> Result<SpectralField> {
    let symbol = make_symbol(spec, field.grid())?;
    let coeffs = field.coeffs().iter().zip(&symbol).map(|(c, m)| c * m).collect();
    let real = field.is_real() && spec.reality_preserving();
    Ok(SpectralField::from_coeffs_flagged(*field.grid(), coeffs, real))
}

#[cfg(test)]
mod tests {
    use super::*;

    const COTH1: f64 = 1.313_035_285_499_331_3;

    fn grid() -> Grid {
        Grid::periodic(64).unwrap()
    }

    #[test]
    fn t_delta_at_one() {
        let m = symbol_at(&MultiplierSpec::TDelta { delta: 1.0 }, 1.0);
        assert!((m - Complex64::new(0.0, -COTH1)).norm() < 1e-10);
        assert!((m.im + 1.313_035_285_5).abs() < 1e-10);
    }

    #[test]
    fn zero_frequency_conventions() {
        for spec in [
            MultiplierSpec::Hilbert,
            MultiplierSpec::TDelta { delta: 0.7 },
            MultiplierSpec::QDelta { delta: 0.7 },
            MultiplierSpec::GDelta { delta: 0.7 },
            MultiplierSpec::Dx,
            MultiplierSpec::DxInv,
        ] {
            assert_eq!(symbol_at(&spec, 0.0), Complex64::new(0.0, 0.0), "{spec:?}");
        }
        let q = symbol_at(&MultiplierSpec::QEffective { delta: 4.0 }, 0.0);
        assert!((q.re - 0.25).abs() < 1e-15);
        let j = symbol_at(&MultiplierSpec::Js { s: -3.2 }, 0.0);
        assert_eq!(j, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn q_delta_at_one() {
        let m = symbol_at(&MultiplierSpec::QDelta { delta: 1.0 }, 1.0);
        assert!((m - Complex64::new(0.0, -(COTH1 - 1.0))).norm() < 1e-12);
    }

    #[test]
    fn invalid_delta() {
        let g = grid();
        assert!(matches!(
            make_symbol(&MultiplierSpec::TDelta { delta: 0.0 }, &g),
            Err(Error::Config(_))
        ));
        assert!(make_symbol(&MultiplierSpec::GDelta { delta: -1.0 }, &g).is_err());
        assert!(make_symbol(&MultiplierSpec::QDelta { delta: f64::NAN }, &g).is_err());
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let g = grid();
        let f = SpectralField::from_real_fn(g, f64::cos);
        let h = apply_symbol(&f, &MultiplierSpec::Hilbert).unwrap();
        let s = SpectralField::from_real_fn(g, f64::sin);
        assert!(h.is_real());
        assert!(h.max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn t_delta_on_exponential() {
        let g = grid();
        let f = SpectralField::from_complex_fn(g, |x| Complex64::new(0.0, x).exp());
        let out = apply_symbol(&f, &MultiplierSpec::TDelta { delta: 1.0 }).unwrap();
        let expect = f.scale_complex(Complex64::new(0.0, -COTH1));
        assert!(out.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn js_zero_is_identity() {
        let g = grid();
        let f = SpectralField::from_real_fn(g, |x| (3.0 * x).sin() + 0.2 * x.cos().exp());
        let out = apply_symbol(&f, &MultiplierSpec::Js { s: 0.0 }).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn g_delta_is_t_minus_inverse_derivative() {
        let delta = 0.6;
        for n in 1..20 {
            let xi = n as f64;
            let g = symbol_at(&MultiplierSpec::GDelta { delta }, xi);
            let t = symbol_at(&MultiplierSpec::TDelta { delta }, xi);
            let dinv = symbol_at(&MultiplierSpec::DxInv, xi);
            assert!((g - (t - dinv / delta)).norm() < 1e-12);
        }
    }

    #[test]
    fn q_effective_is_q_delta_times_derivative() {
        let delta = 1.3;
        for n in [-7, -1, 1, 2, 9] {
            let xi = n as f64;
            let q = symbol_at(&MultiplierSpec::QDelta { delta }, xi);
            let d = symbol_at(&MultiplierSpec::Dx, xi);
            let eff = symbol_at(&MultiplierSpec::QEffective { delta }, xi);
            assert!((eff - q * d).norm() < 1e-14);
        }
    }
}
