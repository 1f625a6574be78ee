//! The periodic gauge transform of a mean-zero solution `v`:
//! primitive `F`, `w = ∂ₓP₊e^{iF}`, phase `γ(t) = ∫₀ᵗ mean(v²)`, and the
//! diagnostics that check `w` against its evolution equation
//!
//! `∂ₜw − H∂ₓ²w = −2∂ₓP₊(∂ₓ⁻¹w·P₋∂ₓv) + i∂ₓP₊(e^{iF}Rv) − i·mean(v²)·w`,
//!
//! where `∂ₓR` is the perturbation of BO carried by the trajectory.
//! `P₀` is taken as the mean throughout, so the free flow of `w` on positive
//! frequencies is `e^{itξ²}e^{−itm₀}` with `m₀ = mean(v₀²)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{galilean_conjugate_trajectory, EquationParams, PerturbationReading, Trajectory};
use crate::spectral::special::coth_minus_sign;
use crate::spectral::{norm, padded_product, physical_map, project, Norm, Projection, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Padding used for `e^{iF}` and the products of the residual.
const PAD: f64 = 2.0;

/// A scalar diagnostic sampled at snapshot times.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanNormalization {
    pub v0: SpectralField,
    /// Speed `c = 2·mean(u₀)` of the frame in which the mean-zero part is followed.
    pub drift_velocity: f64,
    /// `mean(u₀)`.
    pub mean_shift: f64,
}

impl MeanNormalization {
    /// `v(t,x) = u(t, x − ct) − mean`, the inverse of `u(t,x) = mean + v(t, x + ct)`.
    pub fn apply(&self, u: &SpectralField, t: f64) -> SpectralField {
        translate(u, self.drift_velocity * t).map_coeffs(u.is_real(), |n, c| if n == 0 { ZERO } else { c })
    }
}

/// `f(x) ↦ f(x − a)`.
fn translate(f: &SpectralField, a: f64) -> SpectralField {
    if a == 0.0 {
        return f.clone();
    }
    let grid = *f.grid();
    let nyq = grid.nyquist_index();
    let k = grid.frequency_scale();
    f.map_coeffs(f.is_real(), |n, c| {
        let theta = -(n as f64) * k * a;
        if n == nyq {
            c * theta.cos()
        } else {
            c * Complex64::from_polar(1.0, theta)
        }
    })
}

pub fn mean_normalize(u0: &SpectralField) -> Result<MeanNormalization> {
    if !u0.is_real() {
        return Err(Error::precondition("mean normalisation needs a real field"));
    }
    let m = u0.mean();
    let norm = MeanNormalization {
        v0: u0.clone(),
        drift_velocity: 2.0 * m,
        mean_shift: m,
    };
    Ok(MeanNormalization {
        v0: norm.apply(u0, 0.0),
        ..norm
    })
}

/// Applies [`mean_normalize`] snapshot by snapshot with the initial mean.
pub fn mean_normalize_trajectory(traj: &Trajectory) -> Result<Trajectory> {
    let first = traj
        .states
        .first()
        .ok_or_else(|| Error::precondition("empty trajectory"))?;
    let normal = mean_normalize(first)?;
    let states = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, u)| normal.apply(u, t))
        .collect();
    Ok(Trajectory {
        config: traj.config.clone(),
        times: traj.times.clone(),
        states,
    })
}

fn check_mean_zero(v: &SpectralField) -> Result<()> {
    let m = v.mean();
    if m.abs() > 1e-12 * v.max_abs().max(1.0) {
        return Err(Error::precondition(format!("field must have zero mean, mean = {m:e}")));
    }
    Ok(())
}

/// `F` with `∂ₓF = v` and zero mean. The Nyquist coefficient is dropped, in
/// line with `∂ₓ` vanishing there.
pub fn primitive(v: &SpectralField) -> Result<SpectralField> {
    check_mean_zero(v)?;
    let grid = *v.grid();
    let nyq = grid.nyquist_index();
    let k = grid.frequency_scale();
    Ok(v.map_coeffs(v.is_real(), |n, c| {
        if n == 0 || n == nyq {
            ZERO
        } else {
            c / (I * (n as f64 * k))
        }
    }))
}

/// `e^{iF}` evaluated pointwise on a padded grid.
pub fn exp_i_primitive(f: &SpectralField) -> SpectralField {
    physical_map(f, PAD, false, |x| Complex64::from_polar(1.0, x.re))
}

fn dx(f: &SpectralField) -> SpectralField {
    let grid = *f.grid();
    let nyq = grid.nyquist_index();
    let k = grid.frequency_scale();
    f.map_coeffs(f.is_real(), |n, c| if n == nyq { ZERO } else { c * I * (n as f64 * k) })
}

/// `mean(v²) = Σ|cₙ|²`.
fn mean_square(v: &SpectralField) -> f64 {
    v.coeffs().iter().map(|c| c.norm_sqr()).sum()
}

/// `w = ∂ₓP₊e^{iF}` for mean-zero `v`.
pub fn gauge_w(v: &SpectralField) -> Result<SpectralField> {
    Ok(GaugeParts::new(v)?.w)
}

struct GaugeParts {
    f: SpectralField,
    exp_if: SpectralField,
    /// `P₊e^{iF} = ∂ₓ⁻¹w`.
    w_prim: SpectralField,
    w: SpectralField,
}

impl GaugeParts {
    fn new(v: &SpectralField) -> Result<Self> {
        let f = primitive(v)?;
        let exp_if = exp_i_primitive(&f);
        let w_prim = project(&exp_if, Projection::Plus)?;
        let w = dx(&w_prim);
        Ok(Self { f, exp_if, w_prim, w })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeState {
    pub v: SpectralField,
    pub f: SpectralField,
    pub w: SpectralField,
    pub gamma: f64,
    pub m0: f64,
}

impl GaugeState {
    pub fn new(v: &SpectralField, gamma: f64, m0: f64) -> Result<Self> {
        let parts = GaugeParts::new(v)?;
        Ok(Self {
            v: v.clone(),
            f: parts.f,
            w: parts.w,
            gamma,
            m0,
        })
    }

    /// `z = w·e^{iγ}`.
    pub fn z(&self) -> SpectralField {
        self.w.scale_complex(Complex64::from_polar(1.0, self.gamma))
    }
}

/// `∫₀ᵗ mean(v²)` by the trapezoid rule over the snapshots, with linear
/// interpolation of the integrand inside the last interval.
pub fn gamma_integral(traj_v: &Trajectory, t: f64) -> Result<f64> {
    let times = &traj_v.times;
    let t_end = *times.last().ok_or_else(|| Error::precondition("empty trajectory"))?;
    if !(t >= 0.0 && t <= t_end * (1.0 + 1e-12)) {
        return Err(Error::Range(format!("t = {t} outside [0, {t_end}]")));
    }
    let g: Vec<f64> = traj_v.states.iter().map(mean_square).collect();
    let mut acc = 0.0;
    for k in 1..times.len() {
        let (a, b) = (times[k - 1], times[k]);
        if t <= a {
            break;
        }
        if t >= b {
            acc += 0.5 * (b - a) * (g[k - 1] + g[k]);
        } else {
            let gt = g[k - 1] + (g[k] - g[k - 1]) * (t - a) / (b - a);
            acc += 0.5 * (t - a) * (g[k - 1] + gt);
        }
    }
    Ok(acc)
}

/// Which right-hand-side term of the `w` equation to leave out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeTerm {
    /// `H∂ₓ²w`
    Linear,
    /// `−2∂ₓP₊(∂ₓ⁻¹w·P₋∂ₓv)`
    Commutator,
    /// `i∂ₓP₊(e^{iF}Rv)`
    Perturbation,
    /// `−i·mean(v²)·w`
    Phase,
}

impl GaugeTerm {
    pub const ALL: [GaugeTerm; 4] = [
        GaugeTerm::Linear,
        GaugeTerm::Commutator,
        GaugeTerm::Perturbation,
        GaugeTerm::Phase,
    ];
}

/// The two candidate realisations of `R` in the perturbation term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RReading {
    /// `R = ∂ₓ⁻¹ ∘ (perturbation of the evolved equation)`.
    Consistent,
    /// `R = Q_δ` with symbol `−i(coth(δξ) − sgn ξ)`.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugedResidual {
    pub times: Vec<f64>,
    pub consistent: Vec<f64>,
    pub literal: Vec<f64>,
}

impl GaugedResidual {
    fn max_of(v: &[f64]) -> f64 {
        v.iter().copied().fold(0.0, f64::max)
    }

    /// The reading with the smaller worst-case residual (ties go to `Consistent`).
    pub fn canonical(&self) -> RReading {
        if Self::max_of(&self.literal) < Self::max_of(&self.consistent) {
            RReading::Literal
        } else {
            RReading::Consistent
        }
    }

    pub fn series(&self, reading: RReading) -> TimeSeries {
        TimeSeries {
            times: self.times.clone(),
            values: match reading {
                RReading::Consistent => self.consistent.clone(),
                RReading::Literal => self.literal.clone(),
            },
        }
    }

    pub fn max(&self, reading: RReading) -> f64 {
        Self::max_of(&self.series(reading).values)
    }
}

/// A trajectory in the BO frame with its mean removed, and the perturbation
/// `p(ξ)` (as in `∂ₜv̂ = iξ|ξ|v̂ + iξ(v²)^ + p v̂`) it carries.
struct BoFrame {
    traj: Trajectory,
    perturbation: Option<(PerturbationReading, f64)>,
}

fn bo_frame(traj: &Trajectory) -> Result<BoFrame> {
    let (traj, perturbation) = match traj.config.equation.as_str() {
        "ilw" => {
            let delta = traj.config.params.require_delta("ilw")?;
            (
                galilean_conjugate_trajectory(traj)?,
                Some((PerturbationReading::SecondOrder, delta)),
            )
        }
        "bo_perturbed" => {
            let EquationParams { reading, .. } = traj.config.params;
            let delta = traj.config.params.require_delta("bo_perturbed")?;
            (traj.clone(), Some((reading, delta)))
        }
        "bo" => (traj.clone(), None),
        other => {
            return Err(Error::precondition(format!(
                "gauge diagnostics need an ilw, bo_perturbed or bo trajectory, got `{other}`"
            )))
        }
    };
    Ok(BoFrame {
        traj: mean_normalize_trajectory(&traj)?,
        perturbation,
    })
}

fn r_symbol(reading: RReading, perturbation: Option<(PerturbationReading, f64)>, xi: f64) -> Complex64 {
    let Some((evolved, delta)) = perturbation else {
        return ZERO;
    };
    if xi == 0.0 {
        return ZERO;
    }
    match reading {
        RReading::Consistent => evolved.symbol(xi, delta) / (I * xi),
        RReading::Literal => -I * coth_minus_sign(delta * xi),
    }
}

/// Mean-normalised BO-frame snapshots `v(t_j)` with their gauge `w(t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSnapshots {
    pub times: Vec<f64>,
    pub v: Vec<SpectralField>,
    pub w: Vec<SpectralField>,
}

/// Brings an `ilw`, `bo_perturbed` or `bo` trajectory to the BO frame, removes
/// its mean and gauges every snapshot.
pub fn gauge_snapshots(traj: &Trajectory) -> Result<GaugeSnapshots> {
    let frame = bo_frame(traj)?;
    let w = frame.traj.states.iter().map(gauge_w).collect::<Result<Vec<_>>>()?;
    Ok(GaugeSnapshots {
        times: frame.traj.times,
        v: frame.traj.states,
        w,
    })
}

/// Normalised `H⁻¹` residual of the `w` equation at every interior snapshot,
/// for both readings of `R`. `drop` removes one right-hand-side term.
pub fn gauged_residual_with(traj: &Trajectory, drop: Option<GaugeTerm>) -> Result<GaugedResidual> {
    if traj.len() < 3 {
        return Err(Error::precondition("centered differencing needs at least 3 snapshots"));
    }
    let frame = bo_frame(traj)?;
    let states = &frame.traj.states;
    let times = &frame.traj.times;
    let grid = *states[0].grid();
    let nyq = grid.nyquist_index();
    let k = grid.frequency_scale();
    let parts = states.iter().map(GaugeParts::new).collect::<Result<Vec<_>>>()?;
    let keep = |term| drop != Some(term);

    let mut out = GaugedResidual {
        times: Vec::new(),
        consistent: Vec::new(),
        literal: Vec::new(),
    };
    for j in 1..states.len() - 1 {
        let v = &states[j];
        let p = &parts[j];
        let h = times[j + 1] - times[j - 1];
        let dwdt = parts[j + 1].w.sub(&parts[j - 1].w)?.scale(1.0 / h);

        let mut rhs = SpectralField::zeros(grid);
        if keep(GaugeTerm::Linear) {
            rhs = rhs.add(&p.w.map_coeffs(false, |n, c| {
                let xi = n as f64 * k;
                if n == nyq {
                    ZERO
                } else {
                    c * I * (xi * xi.abs())
                }
            }))?;
        }
        if keep(GaugeTerm::Commutator) {
            let minus_dv = project(&dx(v), Projection::Minus)?;
            let prod = padded_product(&p.w_prim, &minus_dv, PAD)?;
            rhs = rhs.axpy(-2.0, &dx(&project(&prod, Projection::Plus)?))?;
        }
        if keep(GaugeTerm::Phase) {
            rhs = rhs.add(&p.w.scale_complex(-I * mean_square(v)))?;
        }
        out.times.push(times[j]);
        for reading in [RReading::Consistent, RReading::Literal] {
            let mut total = rhs.clone();
            if keep(GaugeTerm::Perturbation) && frame.perturbation.is_some() {
                let rv = v.map_coeffs(false, |n, c| {
                    if n == nyq {
                        ZERO
                    } else {
                        c * r_symbol(reading, frame.perturbation, n as f64 * k)
                    }
                });
                let prod = padded_product(&p.exp_if, &rv, PAD)?;
                let term = dx(&project(&prod, Projection::Plus)?).scale_complex(I);
                total = total.add(&term)?;
            }
            let res = dwdt.sub(&total)?;
            let value = norm(&res, Norm::Hs { s: -1.0 })? / (norm(&p.w, Norm::Hs { s: -1.0 })? + 1.0);
            match reading {
                RReading::Consistent => out.consistent.push(value),
                RReading::Literal => out.literal.push(value),
            }
        }
    }
    Ok(out)
}

pub fn gauged_residual(traj: &Trajectory) -> Result<GaugedResidual> {
    gauged_residual_with(traj, None)
}

/// `d(t) = ‖w(t) − Φ(t)w₀‖_{H^{s+ε}}` with `Φ(t) = e^{itξ²}e^{−itm₀}` on `ξ > 0`.
pub fn smoothing_deficit(traj_v: &Trajectory, s: f64, eps: f64) -> Result<TimeSeries> {
    if !(eps > 0.0) {
        return Err(Error::config(format!("eps must be positive, got {eps}")));
    }
    let first = traj_v
        .states
        .first()
        .ok_or_else(|| Error::precondition("empty trajectory"))?;
    check_mean_zero(first)?;
    let frame = bo_frame(traj_v)?;
    let v0 = &frame.traj.states[0];
    let m0 = mean_square(v0);
    let w0 = gauge_w(v0)?;
    let k = w0.grid().frequency_scale();
    let values = frame
        .traj
        .times
        .iter()
        .zip(&frame.traj.states)
        .map(|(&t, v)| {
            let free = w0.map_coeffs(false, |n, c| {
                let xi = n as f64 * k;
                c * Complex64::from_polar(1.0, t * (xi * xi - m0))
            });
            norm(&gauge_w(v)?.sub(&free)?, Norm::Hs { s: s + eps })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeSeries {
        times: frame.traj.times.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve, EvolutionConfig};
    use crate::spectral::Grid;

    fn grid(n: usize) -> Grid {
        Grid::periodic(n).unwrap()
    }

    /// `J₁(1)` from its power series.
    fn bessel_j(n: i32, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(n) / (1..=n).map(f64::from).product::<f64>();
        let mut sum = term;
        for m in 1..40 {
            term *= -(0.25 * x * x) / (m as f64 * (m + n) as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn normalisation_examples() {
        let g = grid(16);
        let u = SpectralField::from_real_fn(g, |x| 1.0 + x.cos());
        let n = mean_normalize(&u).unwrap();
        assert_eq!(n.mean_shift, 1.0);
        assert_eq!(n.drift_velocity, 2.0);
        assert!(n.v0.max_abs_diff(&SpectralField::from_real_fn(g, f64::cos)).unwrap() < 1e-15);
        assert_eq!(n.v0.mean(), 0.0);
        let z = mean_normalize(&SpectralField::zeros(g)).unwrap();
        assert_eq!(z.v0.max_abs(), 0.0);
    }

    #[test]
    fn primitive_examples() {
        let g = grid(16);
        let f = primitive(&SpectralField::from_real_fn(g, f64::cos)).unwrap();
        assert!(f.max_abs_diff(&SpectralField::from_real_fn(g, f64::sin)).unwrap() < 1e-15);
        let f = primitive(&SpectralField::from_real_fn(g, |x| (2.0 * x).sin())).unwrap();
        let want = SpectralField::from_real_fn(g, |x| -(2.0 * x).cos() / 2.0);
        assert!(f.max_abs_diff(&want).unwrap() < 1e-15);
        let bad = SpectralField::from_real_fn(g, |x| 0.1 + x.cos());
        assert!(matches!(primitive(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn w_of_cosine_is_jacobi_anger() {
        let w = gauge_w(&SpectralField::from_real_fn(grid(64), f64::cos)).unwrap();
        assert!((bessel_j(1, 1.0) - 0.440_050_585_7).abs() < 1e-10);
        for n in 1..10 {
            let want = I * (n as f64 * bessel_j(n, 1.0));
            assert!((w.coeff(n as i64) - want).norm() < 1e-13, "n = {n}");
        }
        for n in -32..=0 {
            assert_eq!(w.coeff(n), ZERO);
        }
        assert_eq!(gauge_w(&SpectralField::zeros(grid(16))).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn gamma_of_frozen_and_zero_fields() {
        let g = grid(16);
        let cfg = EvolutionConfig::new("bo", g, 0.1, 1.0);
        let frozen = Trajectory {
            config: cfg.clone(),
            times: (0..=10).map(|k| k as f64 * 0.1).collect(),
            states: vec![SpectralField::from_real_fn(g, f64::cos); 11],
        };
        assert!((gamma_integral(&frozen, 0.55).unwrap() - 0.275).abs() < 1e-14);
        assert!(matches!(gamma_integral(&frozen, 1.5), Err(Error::Range(_))));
        let zero = Trajectory {
            states: vec![SpectralField::zeros(g); 11],
            ..frozen
        };
        assert_eq!(gamma_integral(&zero, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_solution_has_zero_residual() {
        let g = grid(32);
        let cfg = EvolutionConfig::new("ilw", g, 0.01, 0.1).with_delta(1.0);
        let traj = evolve(&SpectralField::zeros(g), &cfg).unwrap();
        let r = gauged_residual(&traj).unwrap();
        assert_eq!(r.times.len(), traj.len() - 2);
        assert!(r.consistent.iter().chain(&r.literal).all(|&x| x == 0.0));
    }

    #[test]
    fn residual_needs_three_snapshots() {
        let g = grid(16);
        let cfg = EvolutionConfig::new("bo", g, 0.1, 0.1);
        let traj = evolve(&SpectralField::zeros(g), &cfg).unwrap();
        assert!(matches!(gauged_residual(&traj), Err(Error::Precondition(_))));
        let cfg = EvolutionConfig::new("kdv", g, 0.01, 0.1);
        let traj = evolve(&SpectralField::zeros(g), &cfg).unwrap();
        assert!(matches!(gauged_residual(&traj), Err(Error::Precondition(_))));
    }

    #[test]
    fn deficit_vanishes_for_zero_data_and_at_t0() {
        let g = grid(32);
        let cfg = EvolutionConfig::new("bo", g, 0.01, 0.1);
        let d = smoothing_deficit(&evolve(&SpectralField::zeros(g), &cfg).unwrap(), 0.2, 0.05).unwrap();
        assert!(d.values.iter().all(|&x| x == 0.0));
        let u0 = SpectralField::from_real_fn(g, |x| 0.3 * x.cos());
        let d = smoothing_deficit(&evolve(&u0, &cfg).unwrap(), 0.2, 0.05).unwrap();
        assert_eq!(d.values[0], 0.0);
    }
}
