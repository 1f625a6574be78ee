use num_complex::Complex64;
use serde_json::json;

use super::report::{Check, Criterion, ExperimentReport, Provenance};
use crate::error::{Error, Result};
use crate::normalform::{ratio_estimate, AuditConfig, OperatorRegistry};
use crate::spectral::special::{coth_minus_sign, jbracket_pow};
use crate::spectral::{norm, Grid, SpectralField};

/// Lower endpoint `s₀ = 3 − √(33/4)` of the deep-water regularity range.
pub fn s0() -> f64 {
    3.0 - (33.0f64 / 4.0).sqrt()
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 2.0) {
        return Err(Error::config(format!("Lebesgue exponent must lie in [2, inf], got {p}")));
    }
    Ok(())
}

/// `α(s,p) = (1/p)(3/2 − s) − s`.
pub fn strichartz_alpha(s: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((1.5 - s) / p - s)
}

/// `β(s,p) = (3/2 − s)(1/4 − 1/(2p)) − s`.
pub fn strichartz_beta(s: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok((1.5 - s) * (0.25 - 0.5 / p) - s)
}

pub fn strichartz_exponents(s: f64, p: f64) -> Result<(f64, f64)> {
    Ok((strichartz_alpha(s, p)?, strichartz_beta(s, p)?))
}

/// Exact `L² → Hˢ` norms of `Q_δ` and `Q_δ∂ₓ` on the lattice, normalised by
/// `δ⁻¹(1+δ^{−s})` and `δ⁻²(1+δ^{−s})`. One row per `(s, δ)` pair, `s` outermost.
pub fn qdelta_scan(s_list: &[f64], delta_list: &[f64], grid: &Grid) -> Result<ExperimentReport> {
    if s_list.is_empty() || delta_list.is_empty() {
        return Err(Error::config("qscan needs nonempty s and delta lists"));
    }
    if let Some(s) = s_list.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(Error::config(format!("s must be finite and nonnegative, got {s}")));
    }
    if let Some(d) = delta_list.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::config(format!("delta must be positive and finite, got {d}")));
    }
    // |q_δ| is even in n, and the Nyquist mode carries no real multiplier.
    let top = grid.max_index();
    if top < 1 {
        return Err(Error::config("grid has no nonzero frequencies"));
    }
    let xis: Vec<f64> = (1..=top).map(|n| n as f64 * grid.frequency_scale()).collect();

    let mut params = Vec::new();
    let mut cols: [Vec<f64>; 5] = Default::default();
    for &s in s_list {
        for &d in delta_list {
            let (mut sup, mut sup_dx) = (0.0f64, 0.0f64);
            for &xi in &xis {
                let q = jbracket_pow(xi, s) * coth_minus_sign(d * xi).abs();
                sup = sup.max(q);
                sup_dx = sup_dx.max(q * xi);
            }
            let scale = 1.0 + d.powf(-s);
            params.push(d);
            cols[0].push(s);
            cols[1].push(sup);
            cols[2].push(sup_dx);
            cols[3].push(sup * d / scale);
            cols[4].push(sup_dx * d * d / scale);
        }
    }
    let provenance = Provenance::new(
        0,
        json!({"s_list": s_list, "delta_list": delta_list, "grid": grid}),
    );
    let mut report = ExperimentReport::new("qscan", "delta", params, provenance);
    for (name, col) in ["s", "norm", "norm_dx", "ratio", "ratio_dx"].into_iter().zip(cols) {
        report.metrics.insert(name.into(), col);
    }
    let max_ratio = report.metrics["ratio"]
        .iter()
        .chain(&report.metrics["ratio_dx"])
        .copied()
        .fold(0.0, f64::max);
    report.scalars.insert("max_ratio".into(), max_ratio);
    for metric in ["ratio", "ratio_dx"] {
        report.criteria.push(Criterion::new(
            format!("{metric} <= 2.5"),
            Check::MaxAtMost {
                metric: metric.into(),
                bound: 2.5,
            },
        ));
    }
    report.finalize()
}

fn check_product_s(s: f64) -> Result<()> {
    if !(s > 0.25 && s < 0.5) {
        return Err(Error::config(format!("product bound requires 1/4 < s < 1/2, got {s}")));
    }
    Ok(())
}

/// Monte-Carlo audit of `‖P_N(fg)‖_{L²} ≲ N^{1/2−2s}‖f‖_{Hˢ}‖g‖_{Hˢ}`.
pub fn product_bound_audit(s: f64, n_grid: &[u64], n_samples: usize, seed: u64) -> Result<ExperimentReport> {
    check_product_s(s)?;
    if n_grid.len() < 2 {
        return Err(Error::config("product audit needs at least two dyadic N"));
    }
    if let Some(n) = n_grid.iter().find(|n| !(n.is_power_of_two() && **n >= 2)) {
        return Err(Error::config(format!("N must be dyadic, got {n}")));
    }
    let mut cfg = AuditConfig::new(n_samples, seed);
    cfg.s = s;
    cfg.params = n_grid.iter().map(|&n| n as f64).collect();
    let ratios = ratio_estimate("prod1", &cfg)?;

    let provenance = Provenance::new(seed, serde_json::to_value(&cfg).map_err(|e| Error::Internal(e.to_string()))?);
    let mut report = ExperimentReport::new("ineq-audit", "N", ratios.params.clone(), provenance);
    report.metrics.insert("max_ratio".into(), ratios.max_ratios.clone());
    report.slopes.insert("max_ratio".into(), ratios.slope);
    report.scalars.insert("bound_exponent".into(), ratios.bound_exponent);
    report.scalars.insert("n_modes".into(), ratios.n_modes as f64);
    report.criteria.push(Criterion::new(
        "slope <= 1/2 - 2s + 0.1",
        Check::SlopeAtMost {
            slope: "max_ratio".into(),
            bound: ratios.bound_exponent + 0.1,
        },
    ));
    report.finalize()
}

/// `‖P_N(f²)‖_{L²} / ‖f‖²_{Hˢ}` for `f = e^{i(N/2)x}`, evaluated through the
/// registered `prod1` operator.
pub fn product_two_mode_ratio(n: u64, s: f64) -> Result<f64> {
    if !(n.is_power_of_two() && n >= 2) {
        return Err(Error::config(format!("N must be dyadic, got {n}")));
    }
    let op = OperatorRegistry::global().get("prod1")?;
    let grid = Grid::periodic(op.default_modes().max(4 * n as usize))?;
    let f = SpectralField::from_modes(grid, &[(n as i64 / 2, Complex64::new(1.0, 0.0))])?;
    let mut cfg = AuditConfig::new(100, 0);
    cfg.s = s;
    let out = op.output_norm(&[f.clone(), f.clone()], n as f64, &cfg)?;
    let nf = norm(&f, op.input_norm(0, &cfg))?;
    Ok(out / (op.normalizer(n as f64, &cfg) * nf * nf))
}
