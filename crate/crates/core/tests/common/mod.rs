//! Direct lattice summation kernels, written out from their definitions
//! independently of the library: σ = 1_{ξ≥1}1_{ξ₁≥1}1_{ξ₂≤−1},
//! Ω(a,b,c) = a|a| − b|b| − c|c|, and the phase factor e^{−itΩ}.
#![allow(dead_code)]

use ilw_lab::normalform::{BilinearVariant, Shells, TrilinearVariant};
use ilw_lab::spectral::{psi_dyadic, Grid, SpectralField};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn om(a: i64, b: i64, c: i64) -> f64 {
    (a * a.abs() - b * b.abs() - c * c.abs()) as f64
}

pub fn sig(a: i64, b: i64, c: i64) -> bool {
    a >= 1 && b >= 1 && c <= -1
}

pub fn ph(t: f64, omega: f64) -> Complex64 {
    (-I * t * omega).exp()
}

pub fn shell(n: Option<u64>, xi: i64) -> f64 {
    n.map_or(1.0, |n| psi_dyadic(xi as f64, n as f64))
}

pub fn bilinear_oracle(v: BilinearVariant, x1: i64, x2: i64, m: f64, t: f64) -> Complex64 {
    let x = x1 + x2;
    if !sig(x, x1, x2) {
        return Complex64::new(0.0, 0.0);
    }
    let o = om(x, x1, x2);
    let full = -2.0 * I * (x as f64) * (x2 as f64) / (x1 as f64) * ph(t, o);
    match v {
        BilinearVariant::Full => full,
        BilinearVariant::LeqM if o.abs() <= m => full,
        BilinearVariant::GtM if o.abs() > m => full,
        BilinearVariant::Zero if o.abs() > m => ph(t, o) / x1 as f64,
        _ => Complex64::new(0.0, 0.0),
    }
}

pub fn trilinear_oracle(v: TrilinearVariant, x1: i64, x2: i64, x3: i64, m: f64, t: f64, sh: &Shells) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let x = x1 + x2 + x3;
    // Four-wave phase, to which both second-generation phases telescope.
    let o4 = (x * x.abs() - x1 * x1.abs() - x2 * x2.abs() - x3 * x3.abs()) as f64;
    match v {
        TrilinearVariant::N2_1 | TrilinearVariant::N2_0 { j: 1 } => {
            let x12 = x1 + x2;
            if !(sig(x, x12, x3) && sig(x12, x1, x2)) || om(x, x12, x3).abs() <= m {
                return zero;
            }
            let o21 = om(x, x12, x3) + om(x12, x1, x2);
            assert_eq!(o21, o4);
            let mm = -2.0 * I * (x2 as f64 / x1 as f64)
                * shell(sh.n12, x12)
                * shell(sh.n1, x1)
                * shell(sh.n2, x2)
                * shell(sh.n3, x3);
            if v == TrilinearVariant::N2_1 {
                mm * ph(t, o21)
            } else {
                mm / (-I * o21) * ph(t, o21)
            }
        }
        _ => {
            let x23 = x2 + x3;
            if !sig(x, x1, x23) || om(x, x1, x23).abs() <= m {
                return zero;
            }
            let o22 = om(x, x1, x23) + om(x23, x2, x3);
            assert_eq!(o22, o4);
            let mstar = Complex64::new(x23 as f64 / x1 as f64, 0.0)
                * shell(sh.n23, x23)
                * shell(sh.n1, x1)
                * shell(sh.n2, x2)
                * shell(sh.n3, x3);
            let low = (x1 + x2).abs() <= 1 || o22.abs() <= m;
            match v {
                TrilinearVariant::N2LeqM if low => -I * mstar * ph(t, o22),
                TrilinearVariant::N2_2 if !low => -I * mstar * ph(t, o22),
                TrilinearVariant::N2_0 { j: 2 } if !low => mstar / (-I * o22) * ph(t, o22),
                _ => zero,
            }
        }
    }
}

pub fn random_field(grid: Grid, rng: &mut ChaCha8Rng) -> SpectralField {
    let modes: Vec<(i64, Complex64)> = grid
        .indices()
        .map(|n| (n, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
        .collect();
    SpectralField::from_modes(grid, &modes).unwrap()
}

pub fn max_rel(a: &SpectralField, b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|c| c.norm()).fold(1.0, f64::max);
    a.coeffs()
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

pub fn brute_bilinear(v: BilinearVariant, w: &SpectralField, u: &SpectralField, m: f64, t: f64) -> Vec<Complex64> {
    let g = *w.grid();
    let mut out = vec![Complex64::new(0.0, 0.0); g.n_modes()];
    for x1 in g.indices() {
        for x2 in g.indices() {
            if let Some(slot) = g.slot(x1 + x2) {
                out[slot] += bilinear_oracle(v, x1, x2, m, t) * w.coeff(x1) * u.coeff(x2);
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn brute_trilinear(
    v: TrilinearVariant,
    w: &SpectralField,
    a: &SpectralField,
    b: &SpectralField,
    m: f64,
    t: f64,
    sh: &Shells,
) -> Vec<Complex64> {
    let g = *w.grid();
    let mut out = vec![Complex64::new(0.0, 0.0); g.n_modes()];
    for x1 in g.indices() {
        for x2 in g.indices() {
            for x3 in g.indices() {
                if let Some(slot) = g.slot(x1 + x2 + x3) {
                    out[slot] += trilinear_oracle(v, x1, x2, x3, m, t, sh) * w.coeff(x1) * a.coeff(x2) * b.coeff(x3);
                }
            }
        }
    }
    out
}

pub const BILINEAR: [BilinearVariant; 4] = [
    BilinearVariant::Full,
    BilinearVariant::LeqM,
    BilinearVariant::GtM,
    BilinearVariant::Zero,
];

pub const TRILINEAR: [TrilinearVariant; 5] = [
    TrilinearVariant::N2_1,
    TrilinearVariant::N2LeqM,
    TrilinearVariant::N2_2,
    TrilinearVariant::N2_0 { j: 1 },
    TrilinearVariant::N2_0 { j: 2 },
];

pub fn single(g: Grid, n: i64) -> SpectralField {
    SpectralField::from_modes(g, &[(n, Complex64::new(1.0, 0.0))]).unwrap()
}
