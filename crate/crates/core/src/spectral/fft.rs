use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Grid, SpectralField};
use crate::error::Result;

type Plans = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, Plans)>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let (planner, plans) = &mut *guard;
    plans
        .entry((len, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// Samples → coefficients (`cₙ = (1/n)Σⱼ fⱼ e^{−2πi jn/len}`), in place.
pub(crate) fn forward(buf: &mut [Complex64]) {
    let len = buf.len();
    plan(len, false).process(buf);
    let scale = 1.0 / len as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
}

/// Coefficients → samples, in place.
pub(crate) fn inverse(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Copy FFT-ordered coefficients of length `n` into a zero-padded array of
/// length `m ≥ n`. The Nyquist coefficient is split evenly between `±n/2`.
pub(crate) fn pad(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = coeffs.len();
    debug_assert!(m >= n && n.is_multiple_of(2));
    if m == n {
        return coeffs.to_vec();
    }
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    out[..half].copy_from_slice(&coeffs[..half]);
    for k in half + 1..n {
        out[m - (n - k)] = coeffs[k];
    }
    let nyq = coeffs[half] * 0.5;
    out[half] = nyq;
    out[m - half] = nyq;
    out
}

/// Inverse of [`pad`]: keep the lattice `{−n/2, …, n/2 − 1}`, folding the
/// `+n/2` coefficient onto the Nyquist slot.
pub(crate) fn truncate(coeffs: &[Complex64], n: usize) -> Vec<Complex64> {
    let m = coeffs.len();
    debug_assert!(m >= n && n.is_multiple_of(2));
    if m == n {
        return coeffs.to_vec();
    }
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    out[..half].copy_from_slice(&coeffs[..half]);
    for k in half + 1..n {
        out[k] = coeffs[m - (n - k)];
    }
    out[half] = coeffs[half] + coeffs[m - half];
    out
}

fn padded_len(n: usize, factor: f64) -> usize {
    let m = (n as f64 * factor.max(1.0)).ceil() as usize;
    m + (m % 2)
}

/// Alias-free pointwise product of two fields, evaluated on a grid padded
/// by `pad_factor` (2 is exact for band-limited inputs) and truncated back.
pub fn padded_product(a: &SpectralField, b: &SpectralField, pad_factor: f64) -> Result<SpectralField> {
    a.grid().check_same(b.grid())?;
    let n = a.grid().n_modes();
    let m = padded_len(n, pad_factor);
    let mut pa = pad(a.coeffs(), m);
    let mut pb = pad(b.coeffs(), m);
    inverse(&mut pa);
    inverse(&mut pb);
    for (x, y) in pa.iter_mut().zip(&pb) {
        *x *= *y;
    }
    forward(&mut pa);
    let coeffs = truncate(&pa, n);
    let real = a.is_real() && b.is_real();
    Ok(SpectralField::from_coeffs_flagged(*a.grid(), coeffs, real))
}

/// Apply `f` pointwise in physical space on a grid padded by `pad_factor`,
/// returning the truncated coefficients. `real` sets the reality flag of the
/// result (the caller knows whether `f` maps reals to reals).
pub fn physical_map<F>(field: &SpectralField, pad_factor: f64, real: bool, f: F) -> SpectralField
where
    F: Fn(Complex64) -> Complex64,
{
    let grid: Grid = *field.grid();
    let n = grid.n_modes();
    let m = padded_len(n, pad_factor);
    let mut buf = pad(field.coeffs(), m);
    inverse(&mut buf);
    for x in buf.iter_mut() {
        *x = f(*x);
    }
    forward(&mut buf);
    SpectralField::from_coeffs_flagged(grid, truncate(&buf, n), real)
}
