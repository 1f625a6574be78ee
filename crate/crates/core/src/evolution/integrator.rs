use num_complex::Complex64;

use super::config::{Dealias, EvolutionConfig, Trajectory};
use super::equation::LinearModel;
use crate::error::{Error, Result};
use crate::spectral::fft as fk;
use crate::spectral::{norm, Grid, Norm, SpectralField};

/// Coefficient magnitude treated as loss of resolution.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Evaluates `iξ·(u²)^` with the configured aliasing treatment.
struct Quadratic {
    grid: Grid,
    dealias: Dealias,
    derivative: Vec<Complex64>,
    keep: Vec<bool>,
    scratch: Vec<Complex64>,
}

impl Quadratic {
    fn new(grid: Grid, dealias: Dealias) -> Self {
        let n = grid.n_modes();
        let nyq = grid.nyquist_index();
        let derivative = (0..n)
            .map(|k| {
                if grid.index_at(k) == nyq {
                    ZERO
                } else {
                    Complex64::new(0.0, grid.wavenumber_at(k))
                }
            })
            .collect();
        // Largest K with 3K < n: inputs on |k| ≤ K square without aliasing onto |k| ≤ K.
        let cutoff = (n as i64 - 1) / 3;
        let keep = (0..n)
            .map(|k| dealias != Dealias::TwoThirds || grid.index_at(k).abs() <= cutoff)
            .collect();
        Self {
            grid,
            dealias,
            derivative,
            keep,
            scratch: Vec::new(),
        }
    }

    fn eval(&mut self, u: &[Complex64], out: &mut [Complex64]) {
        let n = self.grid.n_modes();
        match self.dealias {
            Dealias::Padded => {
                let m = 3 * n / 2 + (3 * n / 2) % 2;
                self.scratch = fk::pad(u, m);
            }
            _ => {
                self.scratch.clear();
                self.scratch
                    .extend(u.iter().zip(&self.keep).map(|(&c, &k)| if k { c } else { ZERO }));
            }
        }
        fk::inverse(&mut self.scratch);
        for x in self.scratch.iter_mut() {
            *x = Complex64::new(x.re * x.re, 0.0);
        }
        fk::forward(&mut self.scratch);
        let sq = if self.dealias == Dealias::Padded {
            fk::truncate(&self.scratch, n)
        } else {
            std::mem::take(&mut self.scratch)
        };
        for k in 0..n {
            out[k] = if self.keep[k] { self.derivative[k] * sq[k] } else { ZERO };
        }
        if self.dealias != Dealias::Padded {
            self.scratch = sq;
        }
    }
}

/// Integrating-factor RK4 stepper for `∂ₜû = ℓû + iξ(u²)^`.
struct Stepper {
    e_half: Vec<Complex64>,
    e_full: Vec<Complex64>,
    quad: Option<Quadratic>,
    h: f64,
    stages: [Vec<Complex64>; 5],
}

impl Stepper {
    fn new(model: &dyn LinearModel, grid: Grid, dealias: Dealias, h: f64) -> Self {
        let n = grid.n_modes();
        let nyq = grid.nyquist_index();
        let generator: Vec<Complex64> = (0..n)
            .map(|k| {
                let l = model.generator(grid.wavenumber_at(k));
                // The unpaired Nyquist mode only keeps the real part of ℓ.
                if grid.index_at(k) == nyq {
                    Complex64::new(l.re, 0.0)
                } else {
                    l
                }
            })
            .collect();
        let e_half = generator.iter().map(|l| (l * (0.5 * h)).exp()).collect();
        let e_full = generator.iter().map(|l| (l * h).exp()).collect();
        let quad = model.nonlinear().then(|| Quadratic::new(grid, dealias));
        Self {
            e_half,
            e_full,
            quad,
            h,
            stages: std::array::from_fn(|_| vec![ZERO; n]),
        }
    }

    fn step(&mut self, u: &mut [Complex64]) {
        let Some(quad) = self.quad.as_mut() else {
            for (c, e) in u.iter_mut().zip(&self.e_full) {
                *c *= e;
            }
            return;
        };
        let h = self.h;
        let n = u.len();
        let [a, b, c, d, tmp] = &mut self.stages;
        let (eh, ef) = (&self.e_half, &self.e_full);

        quad.eval(u, a);
        for k in 0..n {
            tmp[k] = eh[k] * (u[k] + a[k] * (0.5 * h));
        }
        quad.eval(tmp, b);
        for k in 0..n {
            tmp[k] = eh[k] * u[k] + b[k] * (0.5 * h);
        }
        quad.eval(tmp, c);
        for k in 0..n {
            tmp[k] = ef[k] * u[k] + eh[k] * c[k] * h;
        }
        quad.eval(tmp, d);
        for k in 0..n {
            u[k] = ef[k] * u[k] + (ef[k] * a[k] + eh[k] * (b[k] + c[k]) * 2.0 + d[k]) * (h / 6.0);
        }
    }
}

/// Integrate `u0` under `config`, recording every `snapshot_stride` steps.
pub fn evolve(u0: &SpectralField, config: &EvolutionConfig) -> Result<Trajectory> {
    config.validate()?;
    u0.grid().check_same(&config.grid)?;
    if !u0.is_real() {
        return Err(Error::precondition("initial data must be real"));
    }
    let model = config.model()?;
    let (n_steps, h) = config.steps();
    let mut stepper = Stepper::new(model.as_ref(), config.grid, config.dealias, h);

    let mut u = u0.coeffs().to_vec();
    let mut times = vec![0.0];
    let mut states = vec![u0.clone()];
    for step in 1..=n_steps {
        stepper.step(&mut u);
        let t = step as f64 * h;
        if let Some(bad) = u.iter().find(|c| !(c.norm() <= BLOWUP_THRESHOLD)) {
            return Err(Error::Divergence {
                time: t,
                reason: format!("coefficient magnitude {} exceeds {BLOWUP_THRESHOLD:e}", bad.norm()),
            });
        }
        if step % config.snapshot_stride == 0 {
            times.push(t);
            states.push(SpectralField::from_coeffs_flagged(config.grid, u.clone(), true));
        }
    }
    Ok(Trajectory {
        config: config.clone(),
        times,
        states,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfConvergence {
    pub dts: Vec<f64>,
    /// `‖u_{dt_k} − u_{dt_{k+1}}‖_{L²}` at the final time.
    pub differences: Vec<f64>,
    /// `log₂` of successive difference ratios.
    pub orders: Vec<f64>,
}

/// Final-time self-differences under repeated halving of `config.dt`.
pub fn self_convergence(u0: &SpectralField, config: &EvolutionConfig, levels: usize) -> Result<SelfConvergence> {
    if levels < 3 {
        return Err(Error::config("self-convergence needs at least 3 levels"));
    }
    let dts: Vec<f64> = (0..levels).map(|k| config.dt / f64::powi(2.0, k as i32)).collect();
    let finals = dts
        .iter()
        .map(|&dt| {
            let mut c = config.clone();
            c.dt = dt;
            evolve_final(u0, &c)
        })
        .collect::<Result<Vec<_>>>()?;
    let differences = finals
        .windows(2)
        .map(|w| w[0].sub(&w[1]).and_then(|d| norm(&d, Norm::L2)))
        .collect::<Result<Vec<_>>>()?;
    let orders = differences.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(SelfConvergence {
        dts,
        differences,
        orders,
    })
}

/// State at `t_final` only.
pub fn evolve_final(u0: &SpectralField, config: &EvolutionConfig) -> Result<SpectralField> {
    let (n_steps, _) = config.steps();
    let mut c = config.clone();
    c.snapshot_stride = n_steps;
    let traj = evolve(u0, &c)?;
    Ok(traj.states.last().expect("at least the initial state").clone())
}
