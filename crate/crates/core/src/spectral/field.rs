use num_complex::Complex64;

use super::fft;
use super::Grid;
use crate::error::{Error, Result};

/// Fourier coefficients of a function on a [`Grid`], stored in FFT order.
///
/// `real` records that the field represents a real-valued function, in which
/// case `c₋ₙ = conj(cₙ)` holds and the Nyquist coefficient is real.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n_modes()],
            real: true,
        }
    }

    /// Forward transform of real samples. The result is symmetrised so the
    /// Hermitian property holds exactly.
    pub fn from_real_samples(grid: Grid, samples: &[f64]) -> Result<Self> {
        check_len(&grid, samples.len())?;
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft::forward(&mut buf);
        let mut field = Self {
            grid,
            coeffs: buf,
            real: true,
        };
        field.symmetrize();
        Ok(field)
    }

    pub fn from_complex_samples(grid: Grid, samples: &[Complex64]) -> Result<Self> {
        check_len(&grid, samples.len())?;
        let mut buf = samples.to_vec();
        fft::forward(&mut buf);
        Ok(Self {
            grid,
            coeffs: buf,
            real: false,
        })
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = grid.points().into_iter().map(f).collect();
        Self::from_real_samples(grid, &samples).expect("sample count matches grid")
    }

    pub fn from_complex_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let samples: Vec<Complex64> = grid.points().into_iter().map(f).collect();
        Self::from_complex_samples(grid, &samples).expect("sample count matches grid")
    }

    /// Coefficients in FFT order; the reality flag is inferred from the
    /// Hermitian symmetry of the data (exact comparison).
    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, coeffs.len())?;
        let mut field = Self {
            grid,
            coeffs,
            real: false,
        };
        field.real = field.hermitian_defect() == 0.0;
        Ok(field)
    }

    /// Build from lattice-indexed coefficients `(n, cₙ)`; unspecified modes are zero.
    pub fn from_modes(grid: Grid, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n_modes()];
        for &(n, c) in modes {
            let slot = grid
                .slot(n)
                .ok_or_else(|| Error::shape(format!("frequency {n} is not on the lattice")))?;
            coeffs[slot] += c;
        }
        Self::from_coeffs(grid, coeffs)
    }

    pub(crate) fn from_coeffs_flagged(grid: Grid, coeffs: Vec<Complex64>, real: bool) -> Self {
        debug_assert_eq!(coeffs.len(), grid.n_modes());
        let mut field = Self { grid, coeffs, real };
        if real {
            field.symmetrize();
        }
        field
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Coefficient at lattice index `n` (zero off the lattice).
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.grid
            .slot(n)
            .map_or(Complex64::new(0.0, 0.0), |s| self.coeffs[s])
    }

    /// Mean value `c₀`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Mutable coefficient access; clears the reality flag since arbitrary
    /// edits may break Hermitian symmetry.
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        self.real = false;
        &mut self.coeffs
    }

    /// Largest relative violation of `c₋ₙ = conj(cₙ)`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for n in 0..=self.grid.max_index() {
            let d = (self.coeff(n) - self.coeff(-n).conj()).norm();
            worst = worst.max(d);
        }
        let nyq = self.coeff(self.grid.nyquist_index());
        worst = worst.max(nyq.im.abs());
        worst / scale
    }

    /// Re-impose exact Hermitian symmetry and mark the field real.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        self.coeffs[0].im = 0.0;
        for n in 1..=g.max_index() {
            let (p, m) = (g.slot(n).unwrap(), g.slot(-n).unwrap());
            let avg = (self.coeffs[p] + self.coeffs[m].conj()) * 0.5;
            self.coeffs[p] = avg;
            self.coeffs[m] = avg.conj();
        }
        let nyq = g.slot(g.nyquist_index()).unwrap();
        self.coeffs[nyq].im = 0.0;
        self.real = true;
    }

    pub fn to_complex_samples(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        fft::inverse(&mut buf);
        buf
    }

    /// Physical samples of a real field. Fails for fields without the reality flag.
    pub fn to_real_samples(&self) -> Result<Vec<f64>> {
        if !self.real {
            return Err(Error::precondition("field is not flagged real"));
        }
        Ok(self.to_complex_samples().into_iter().map(|c| c.re).collect())
    }

    pub fn map_coeffs(&self, real: bool, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| f(self.grid.index_at(k), c))
            .collect();
        Self::from_coeffs_flagged(self.grid, coeffs, real)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
            real: self.real,
        }
    }

    pub fn scale_complex(&self, a: Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
            real: self.real && a.im == 0.0,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.zip(other, |x, y| x + y * a)
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect(),
            real: self.real && other.real,
        })
    }

    /// Largest coefficient-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

fn check_len(grid: &Grid, len: usize) -> Result<()> {
    if len != grid.n_modes() {
        return Err(Error::shape(format!(
            "expected {} samples, got {len}",
            grid.n_modes()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_coefficients() {
        let g = Grid::periodic(64).unwrap();
        let f = SpectralField::from_real_fn(g, f64::cos);
        assert!(f.is_real());
        for n in g.indices() {
            let expect = if n.abs() == 1 { 0.5 } else { 0.0 };
            assert!((f.coeff(n) - Complex64::new(expect, 0.0)).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn complex_exponential() {
        let g = Grid::periodic(64).unwrap();
        let f = SpectralField::from_complex_fn(g, |x| Complex64::new(0.0, 3.0 * x).exp());
        assert!(!f.is_real());
        assert!((f.coeff(3) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(f.coeff(-3).norm() < 1e-12);
    }

    #[test]
    fn sample_length_checked() {
        let g = Grid::periodic(16).unwrap();
        assert!(matches!(
            SpectralField::from_real_samples(g, &[0.0; 15]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn off_lattice_mode_rejected() {
        let g = Grid::periodic(8).unwrap();
        assert!(SpectralField::from_modes(g, &[(4, Complex64::new(1.0, 0.0))]).is_err());
    }
}
