//! Cancellation-free evaluation of `coth` and its two regularised
//! differences `coth(x) − 1/x` and `coth(x) − sgn(x)`.

const SERIES_CUTOFF: f64 = 0.1;
const TAIL_CUTOFF: f64 = 20.0;

// Odd Laurent coefficients of coth(x) − 1/x: 2^{2k} B_{2k} / (2k)!.
const LAURENT: [f64; 5] = [
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
];

fn laurent_tail(x: f64) -> f64 {
    let x2 = x * x;
    LAURENT.iter().rev().fold(0.0, |acc, &c| acc * x2 + c) * x
}

/// `sgn(x)` with `sgn(0) = 0`.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Hyperbolic cotangent. Infinite at zero.
pub fn coth(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        f64::INFINITY.copysign(x)
    } else if ax < SERIES_CUTOFF {
        1.0 / x + laurent_tail(x)
    } else if ax > TAIL_CUTOFF {
        sgn(x) * (1.0 + 2.0 * (-2.0 * ax).exp())
    } else {
        1.0 / x.tanh()
    }
}

/// `coth(x) − 1/x`, with the value 0 at `x = 0`.
pub fn coth_minus_recip(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_CUTOFF {
        laurent_tail(x)
    } else if ax > TAIL_CUTOFF {
        sgn(x) * (1.0 + 2.0 * (-2.0 * ax).exp()) - 1.0 / x
    } else {
        1.0 / x.tanh() - 1.0 / x
    }
}

/// `coth(x) − sgn(x) = sgn(x)·2/(e^{2|x|} − 1)`, with the value 0 at `x = 0`.
pub fn coth_minus_sign(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    sgn(x) * 2.0 / (2.0 * x.abs()).exp_m1()
}

/// `x·(coth(x) − sgn(x))`, continuously extended by 1 at `x = 0`.
pub fn x_coth_minus_sign(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-8 {
        // 2|x|/(e^{2|x|}−1) = 1 − |x| + |x|²/3 + …
        1.0 - ax + ax * ax / 3.0
    } else {
        2.0 * ax / (2.0 * ax).exp_m1()
    }
}

/// Japanese bracket `⟨ξ⟩ = (1 + ξ²)^{1/2}` raised to `s`.
pub fn jbracket_pow(xi: f64, s: f64) -> f64 {
    (1.0 + xi * xi).powf(0.5 * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Lambert's continued fraction tanh x = x/(1 + x²/(3 + x²/(5 + …))).
    fn coth_cf(x: f64) -> f64 {
        let x2 = x * x;
        let mut acc = 0.0;
        for k in (0..60).rev() {
            acc = x2 / ((2 * k + 3) as f64 + acc);
        }
        (1.0 + acc) / x
    }

    #[test]
    fn coth_matches_continued_fraction() {
        for &x in &[1e-6, 0.05, 0.0999, 0.1, 0.5, 1.0, 3.0, 19.0, 21.0, -0.07, -2.5] {
            let a = coth(x);
            let b = coth_cf(x);
            assert!(((a - b) / b).abs() < 1e-14, "x = {x}: {a} vs {b}");
        }
        assert!((coth(1.0) - 1.313_035_285_499_331_3).abs() < 1e-15);
    }

    #[test]
    fn differences_match_oracle() {
        for &x in &[1e-4, 0.03, 0.0999, 0.1001, 0.7, 1.0, 5.0, -0.04, -3.0] {
            let cf = coth_cf(x);
            let d1 = coth_minus_recip(x);
            assert!((d1 - (cf - 1.0 / x)).abs() < 1e-12 * (1.0 + d1.abs()), "x = {x}");
            // The recip difference is ~x/3 for small x; check relative accuracy too.
            if x.abs() < 0.2 {
                assert!(((d1 - x / 3.0) / (x / 3.0)).abs() < 0.01);
            }
        }
        assert!((coth_minus_sign(1.0) - 0.313_035_285_499_331_3).abs() < 1e-15);
        assert_eq!(coth_minus_recip(0.0), 0.0);
        assert_eq!(coth_minus_sign(0.0), 0.0);
    }

    #[test]
    fn exponential_tail_bound() {
        for &d in &[1.0_f64, 2.0, 4.0, 8.0] {
            assert!(coth_minus_sign(d) <= 3.0 * (-2.0 * d).exp());
        }
    }

    #[test]
    fn regularised_product_continuous_at_zero() {
        assert!((x_coth_minus_sign(1e-9) - 1.0).abs() < 1e-8);
        assert!((x_coth_minus_sign(2e-8) - 2e-8 * coth_minus_sign(2e-8)).abs() < 1e-12);
        assert!((x_coth_minus_sign(1.0) - coth_minus_sign(1.0)).abs() < 1e-15);
    }
}
