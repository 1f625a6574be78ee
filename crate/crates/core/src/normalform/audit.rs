use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operators::{bilinear_nf, trilinear_nf, BilinearVariant, TrilinearVariant};
use super::spec::{NormalFormSpec, Shells};
use crate::error::{Error, Result};
use crate::spectral::{norm, padded_product, project, Grid, Norm, Projection, SpectralField};

/// Settings shared by all ratio audits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    /// Values of `M` (or of the dyadic `N`); the operator's default grid when empty.
    #[serde(default)]
    pub params: Vec<f64>,
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub theta: f64,
    /// Lattice size; the operator's default when `None`.
    #[serde(default)]
    pub n_modes: Option<usize>,
    /// Greedy coordinate ascent from the best random sample.
    #[serde(default = "default_refine")]
    pub refine: bool,
}

fn default_refine() -> bool {
    true
}

impl AuditConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self {
            params: Vec::new(),
            n_samples,
            seed,
            s: 0.0,
            theta: 0.0,
            n_modes: None,
            refine: true,
        }
    }
}

/// An operator bound of the form `‖T(u₁,…)‖ ≲ p^a·∏‖u_k‖` audited by sampling.
pub trait AuditedOperator: Debug + Send + Sync {
    fn name(&self) -> &'static str;
    /// Name of the scanned parameter, `"M"` or `"N"`.
    fn parameter(&self) -> &'static str;
    fn default_params(&self) -> Vec<f64>;
    fn default_modes(&self) -> usize;
    fn arity(&self) -> usize;
    /// Lattice indices on which input `slot` is drawn.
    fn support(&self, slot: usize, param: f64, grid: &Grid) -> Vec<i64>;
    fn input_norm(&self, slot: usize, cfg: &AuditConfig) -> Norm;
    /// `‖T(inputs)‖` in the operator's target norm.
    fn output_norm(&self, inputs: &[SpectralField], param: f64, cfg: &AuditConfig) -> Result<f64>;
    /// Exponent `a` of the parameter in the bound.
    fn bound_exponent(&self, cfg: &AuditConfig) -> f64;
    /// Extra parameter-dependent factor in the bound besides `p^a`.
    fn normalizer(&self, _param: f64, _cfg: &AuditConfig) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub operator: String,
    pub parameter: String,
    pub params: Vec<f64>,
    pub max_ratios: Vec<f64>,
    /// Least-squares slope of `log ratio` against `log param`.
    pub slope: f64,
    pub bound_exponent: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub s: f64,
    pub theta: f64,
    pub n_modes: usize,
}

/// Least-squares slope of `ln y` against `ln x` over the points with `y > 0`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn all_indices(grid: &Grid) -> Vec<i64> {
    grid.indices().collect()
}

fn positive(grid: &Grid) -> Vec<i64> {
    (1..=grid.max_index()).collect()
}

fn negative(grid: &Grid) -> Vec<i64> {
    (grid.min_index()..=-1).collect()
}

fn nf_spec(grid: Grid, m: f64, cfg: &AuditConfig) -> NormalFormSpec {
    NormalFormSpec {
        m,
        s: cfg.s,
        theta: cfg.theta,
        grid,
        shells: Shells::default(),
        t: 0.0,
    }
}

const M_GRID: [f64; 7] = [4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];

/// Calibration case: the identity map, ratio exactly 1.
#[derive(Debug)]
struct IdentityOp;

impl AuditedOperator for IdentityOp {
    fn name(&self) -> &'static str {
        "identity"
    }
    fn parameter(&self) -> &'static str {
        "M"
    }
    fn default_params(&self) -> Vec<f64> {
        M_GRID.to_vec()
    }
    fn default_modes(&self) -> usize {
        32
    }
    fn arity(&self) -> usize {
        1
    }
    fn support(&self, _: usize, _: f64, grid: &Grid) -> Vec<i64> {
        all_indices(grid)
    }
    fn input_norm(&self, _: usize, cfg: &AuditConfig) -> Norm {
        Norm::Hs { s: cfg.s }
    }
    fn output_norm(&self, inputs: &[SpectralField], _: f64, cfg: &AuditConfig) -> Result<f64> {
        norm(&inputs[0], Norm::Hs { s: cfg.s })
    }
    fn bound_exponent(&self, _: &AuditConfig) -> f64 {
        0.0
    }
}

/// `N⁽¹⁾_{≤M}` or `N⁽¹⁾₀` from `H^s × L²` into `H^{s+θ}`.
#[derive(Debug)]
struct FirstGeneration {
    name: &'static str,
    variant: BilinearVariant,
}

impl AuditedOperator for FirstGeneration {
    fn name(&self) -> &'static str {
        self.name
    }
    fn parameter(&self) -> &'static str {
        "M"
    }
    fn default_params(&self) -> Vec<f64> {
        M_GRID.to_vec()
    }
    fn default_modes(&self) -> usize {
        64
    }
    fn arity(&self) -> usize {
        2
    }
    fn support(&self, slot: usize, _: f64, grid: &Grid) -> Vec<i64> {
        if slot == 0 {
            positive(grid)
        } else {
            negative(grid)
        }
    }
    fn input_norm(&self, slot: usize, cfg: &AuditConfig) -> Norm {
        if slot == 0 {
            Norm::Hs { s: cfg.s }
        } else {
            Norm::L2
        }
    }
    fn output_norm(&self, inputs: &[SpectralField], m: f64, cfg: &AuditConfig) -> Result<f64> {
        let spec = nf_spec(*inputs[0].grid(), m, cfg);
        let out = bilinear_nf(self.variant, &inputs[0], &inputs[1], &spec)?;
        norm(&out, Norm::Hs { s: cfg.s + cfg.theta })
    }
    fn bound_exponent(&self, cfg: &AuditConfig) -> f64 {
        match self.variant {
            BilinearVariant::Zero => -0.125 + cfg.theta / 4.0,
            _ => 1.0,
        }
    }
}

/// `N⁽²⁾_{≤M}` from `(H^s)³` into `H^{s+θ}`.
#[derive(Debug)]
struct SecondGenerationLow;

impl AuditedOperator for SecondGenerationLow {
    fn name(&self) -> &'static str {
        "N2_leqM"
    }
    fn parameter(&self) -> &'static str {
        "M"
    }
    fn default_params(&self) -> Vec<f64> {
        M_GRID.to_vec()
    }
    fn default_modes(&self) -> usize {
        64
    }
    fn arity(&self) -> usize {
        3
    }
    fn support(&self, slot: usize, _: f64, grid: &Grid) -> Vec<i64> {
        if slot == 0 {
            positive(grid)
        } else {
            all_indices(grid)
        }
    }
    fn input_norm(&self, _: usize, cfg: &AuditConfig) -> Norm {
        Norm::Hs { s: cfg.s }
    }
    fn output_norm(&self, inputs: &[SpectralField], m: f64, cfg: &AuditConfig) -> Result<f64> {
        let spec = nf_spec(*inputs[0].grid(), m, cfg);
        let out = trilinear_nf(TrilinearVariant::N2LeqM, &inputs[0], &inputs[1], &inputs[2], &spec)?;
        norm(&out, Norm::Hs { s: cfg.s + cfg.theta })
    }
    fn bound_exponent(&self, _: &AuditConfig) -> f64 {
        1.5
    }
}

/// Dyadic bound for `N⁽²⁾_{1,0}` with `w` on shell `N = N_max` and both `v`
/// inputs on shell 2: `sup_K ‖P_K N⁽²⁾_{1,0}‖_{H^{s+θ}} ≲ N^{−1−s+θ}·2^{2s}·∏‖·‖_{L²}`.
#[derive(Debug)]
struct SecondGenerationDyadic;

const LOW_SHELL: u64 = 2;

impl AuditedOperator for SecondGenerationDyadic {
    fn name(&self) -> &'static str {
        "N2_0_dyadic"
    }
    fn parameter(&self) -> &'static str {
        "N"
    }
    fn default_params(&self) -> Vec<f64> {
        vec![4.0, 8.0, 16.0, 32.0]
    }
    fn default_modes(&self) -> usize {
        128
    }
    fn arity(&self) -> usize {
        3
    }
    fn support(&self, slot: usize, n: f64, _: &Grid) -> Vec<i64> {
        let shell = if slot == 0 { n } else { LOW_SHELL as f64 };
        let lo = (shell / 2.0).floor() as i64 + 1;
        let hi = (2.0 * shell).ceil() as i64 - 1;
        if slot == 0 {
            (lo..=hi).collect()
        } else {
            (-hi..=-lo).collect()
        }
    }
    fn input_norm(&self, _: usize, _: &AuditConfig) -> Norm {
        Norm::L2
    }
    fn output_norm(&self, inputs: &[SpectralField], n: f64, cfg: &AuditConfig) -> Result<f64> {
        let grid = *inputs[0].grid();
        let mut spec = nf_spec(grid, 1.0, cfg);
        spec.shells = Shells {
            n1: Some(n as u64),
            n2: Some(LOW_SHELL),
            n3: Some(LOW_SHELL),
            n12: None,
            n23: None,
        };
        let out = trilinear_nf(TrilinearVariant::N2_0 { j: 1 }, &inputs[0], &inputs[1], &inputs[2], &spec)?;
        let mut best: f64 = norm(&project(&out, Projection::Lo)?, Norm::Hs { s: cfg.s + cfg.theta })?;
        let mut k = 1;
        while k <= grid.n_modes() as u64 / 2 {
            let part = project(&out, Projection::Dyadic { n: k })?;
            best = best.max(norm(&part, Norm::Hs { s: cfg.s + cfg.theta })?);
            k *= 2;
        }
        Ok(best)
    }
    fn bound_exponent(&self, cfg: &AuditConfig) -> f64 {
        -1.0 - cfg.s + cfg.theta
    }
    fn normalizer(&self, _: f64, cfg: &AuditConfig) -> f64 {
        (LOW_SHELL as f64).powf(2.0 * cfg.s)
    }
}

/// `‖P_N(fg)‖_{L²} ≲ N^{1/2−2s}‖f‖_{H^s}‖g‖_{H^s}`, inputs drawn on `|ξ| ≤ 2N`.
#[derive(Debug)]
struct ProductBound;

impl AuditedOperator for ProductBound {
    fn name(&self) -> &'static str {
        "prod1"
    }
    fn parameter(&self) -> &'static str {
        "N"
    }
    fn default_params(&self) -> Vec<f64> {
        vec![8.0, 16.0, 32.0, 64.0, 128.0]
    }
    fn default_modes(&self) -> usize {
        512
    }
    fn arity(&self) -> usize {
        2
    }
    fn support(&self, _: usize, n: f64, grid: &Grid) -> Vec<i64> {
        let r = (2.0 * n) as i64;
        grid.indices().filter(|k| k.abs() <= r).collect()
    }
    fn input_norm(&self, _: usize, cfg: &AuditConfig) -> Norm {
        Norm::Hs { s: cfg.s }
    }
    fn output_norm(&self, inputs: &[SpectralField], n: f64, _: &AuditConfig) -> Result<f64> {
        let prod = padded_product(&inputs[0], &inputs[1], 2.0)?;
        norm(&project(&prod, Projection::Dyadic { n: n as u64 })?, Norm::L2)
    }
    fn bound_exponent(&self, cfg: &AuditConfig) -> f64 {
        0.5 - 2.0 * cfg.s
    }
}

/// Name → audited operator.
pub struct OperatorRegistry {
    ops: BTreeMap<&'static str, Arc<dyn AuditedOperator>>,
}

impl OperatorRegistry {
    pub fn empty() -> Self {
        Self { ops: BTreeMap::new() }
    }

    pub fn register(&mut self, op: Arc<dyn AuditedOperator>) {
        self.ops.insert(op.name(), op);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn AuditedOperator>> {
        self.ops.get(name).cloned().ok_or_else(|| Error::UnknownName {
            kind: "audited operator",
            name: name.to_string(),
            known: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.ops.keys().copied().collect()
    }

    pub fn global() -> &'static OperatorRegistry {
        static REGISTRY: OnceLock<OperatorRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| {
            let mut r = Self::empty();
            r.register(Arc::new(IdentityOp));
            r.register(Arc::new(FirstGeneration {
                name: "N1_leqM",
                variant: BilinearVariant::LeqM,
            }));
            r.register(Arc::new(FirstGeneration {
                name: "N1_0",
                variant: BilinearVariant::Zero,
            }));
            r.register(Arc::new(SecondGenerationLow));
            r.register(Arc::new(SecondGenerationDyadic));
            r.register(Arc::new(ProductBound));
            r
        })
    }
}

struct Sampler<'a> {
    op: &'a dyn AuditedOperator,
    cfg: &'a AuditConfig,
    grid: Grid,
    param: f64,
    supports: Vec<Vec<i64>>,
}

impl Sampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<SpectralField> {
        self.supports
            .iter()
            .map(|support| loop {
                let modes: Vec<(i64, Complex64)> = support
                    .iter()
                    .map(|&k| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        (k, Complex64::new(re, im))
                    })
                    .collect();
                let f = SpectralField::from_modes(self.grid, &modes).expect("support lies on the lattice");
                if f.max_abs() > 0.0 {
                    break f;
                }
            })
            .collect()
    }

    fn ratio(&self, inputs: &[SpectralField]) -> Result<f64> {
        let mut denom = self.op.normalizer(self.param, self.cfg);
        for (slot, f) in inputs.iter().enumerate() {
            denom *= norm(f, self.op.input_norm(slot, self.cfg))?;
        }
        if denom == 0.0 {
            return Ok(0.0);
        }
        Ok(self.op.output_norm(inputs, self.param, self.cfg)? / denom)
    }

    /// Coordinate ascent over the real and imaginary parts of every drawn coefficient.
    fn refine(&self, mut inputs: Vec<SpectralField>, mut best: f64) -> Result<f64> {
        let dirs = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        for pass in 0..2 {
            for slot in 0..inputs.len() {
                let scale = inputs[slot].max_abs() * 0.5f64.powi(pass + 1);
                for &k in &self.supports[slot] {
                    let idx = self.grid.slot(k).expect("support lies on the lattice");
                    for d in dirs {
                        let old = inputs[slot].coeffs()[idx];
                        inputs[slot].coeffs_mut()[idx] = old + d * scale;
                        let r = self.ratio(&inputs)?;
                        if r > best {
                            best = r;
                        } else {
                            inputs[slot].coeffs_mut()[idx] = old;
                        }
                    }
                }
            }
        }
        Ok(best)
    }
}

fn sample_rng(seed: u64, param_index: usize, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((param_index as u64) << 32) | sample as u64);
    rng
}

/// Empirical maximum of `‖T(u)‖ / (p^0·∏‖u_k‖)` per parameter value, with the
/// log-log slope across the parameter grid.
pub fn ratio_estimate(name: &str, cfg: &AuditConfig) -> Result<RatioReport> {
    let op = OperatorRegistry::global().get(name)?;
    ratio_estimate_with(op.as_ref(), cfg)
}

pub fn ratio_estimate_with(op: &dyn AuditedOperator, cfg: &AuditConfig) -> Result<RatioReport> {
    if cfg.n_samples < 100 {
        return Err(Error::config(format!("n_samples must be at least 100, got {}", cfg.n_samples)));
    }
    let params = if cfg.params.is_empty() {
        op.default_params()
    } else {
        cfg.params.clone()
    };
    if params.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
        return Err(Error::config(format!("parameters must be positive, got {params:?}")));
    }
    let n_modes = cfg.n_modes.unwrap_or_else(|| op.default_modes());
    let grid = Grid::periodic(n_modes)?;
    let mut max_ratios = Vec::with_capacity(params.len());
    for (pi, &param) in params.iter().enumerate() {
        let sampler = Sampler {
            op,
            cfg,
            grid,
            param,
            supports: (0..op.arity()).map(|slot| op.support(slot, param, &grid)).collect(),
        };
        let (best, best_k) = (0..cfg.n_samples)
            .into_par_iter()
            .map(|k| {
                let inputs = sampler.draw(&mut sample_rng(cfg.seed, pi, k));
                sampler.ratio(&inputs).map(|r| (r, k))
            })
            .try_reduce(
                || (f64::NEG_INFINITY, usize::MAX),
                |a, b| Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
            )?;
        let best = if cfg.refine {
            let inputs = sampler.draw(&mut sample_rng(cfg.seed, pi, best_k));
            sampler.refine(inputs, best)?
        } else {
            best
        };
        max_ratios.push(best);
    }
    let slope = fit_slope(&params, &max_ratios);
    if !slope.is_finite() {
        return Err(Error::Internal(format!(
            "{}: slope undefined, ratios {max_ratios:?}",
            op.name()
        )));
    }
    Ok(RatioReport {
        operator: op.name().to_string(),
        parameter: op.parameter().to_string(),
        params,
        max_ratios,
        slope,
        bound_exponent: op.bound_exponent(cfg),
        n_samples: cfg.n_samples,
        seed: cfg.seed,
        s: cfg.s,
        theta: cfg.theta,
        n_modes,
    })
}
