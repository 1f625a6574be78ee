use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::special::x_coth_minus_sign;
use crate::spectral::PropagatorTag;

/// The linear part and nonlinearity switch of an evolution equation.
pub trait LinearModel: Debug + Send + Sync {
    fn name(&self) -> &str;

    /// `ℓ(ξ)` such that the linear flow is `∂ₜû = ℓ(ξ)û`.
    fn generator(&self, xi: f64) -> Complex64;

    /// Whether `∂ₓ(u²)` is present.
    fn nonlinear(&self) -> bool {
        true
    }

    /// Depth parameter, for equations that carry one.
    fn delta(&self) -> Option<f64> {
        None
    }
}

/// How the perturbation of the Galilean-conjugated ILW equation is realised.
///
/// Conjugating ILW exactly produces the BO equation plus the term with symbol
/// `iξ·ξ(coth(δξ) − sgn ξ)`, i.e. `∂ₓ` composed with the `q_effective`
/// multiplier. The single-derivative reading drops that `∂ₓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationReading {
    /// Symbol `iξ²(coth(δξ) − sgn ξ)`.
    #[default]
    SecondOrder,
    /// Symbol `ξ(coth(δξ) − sgn ξ)`, zero at `ξ = 0`.
    FirstOrder,
}

impl PerturbationReading {
    pub fn symbol(&self, xi: f64, delta: f64) -> Complex64 {
        if xi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let q_eff = x_coth_minus_sign(delta * xi) / delta;
        match self {
            PerturbationReading::SecondOrder => Complex64::new(0.0, xi * q_eff),
            PerturbationReading::FirstOrder => Complex64::new(q_eff, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EquationParams {
    pub delta: Option<f64>,
    #[serde(default)]
    pub reading: PerturbationReading,
}

impl EquationParams {
    pub fn with_delta(delta: f64) -> Self {
        Self {
            delta: Some(delta),
            ..Self::default()
        }
    }

    pub fn require_delta(&self, equation: &str) -> Result<f64> {
        match self.delta {
            Some(d) if d > 0.0 => Ok(d),
            Some(d) => Err(Error::config(format!("{equation}: delta must be positive, got {d}"))),
            None => Err(Error::config(format!("{equation}: delta is required"))),
        }
    }
}

#[derive(Debug)]
struct Ilw {
    name: &'static str,
    delta: f64,
    nonlinear: bool,
    scaled: bool,
}

impl LinearModel for Ilw {
    fn name(&self) -> &str {
        self.name
    }
    fn generator(&self, xi: f64) -> Complex64 {
        let tag = if self.scaled {
            PropagatorTag::Silw { delta: self.delta }
        } else {
            PropagatorTag::Ilw { delta: self.delta }
        };
        tag.generator(xi)
    }
    fn nonlinear(&self) -> bool {
        self.nonlinear
    }
    fn delta(&self) -> Option<f64> {
        Some(self.delta)
    }
}

#[derive(Debug)]
struct Bo {
    name: &'static str,
    nonlinear: bool,
}

impl LinearModel for Bo {
    fn name(&self) -> &str {
        self.name
    }
    fn generator(&self, xi: f64) -> Complex64 {
        PropagatorTag::Bo.generator(xi)
    }
    fn nonlinear(&self) -> bool {
        self.nonlinear
    }
}

/// `∂ₜv + c∂ₓ³v = ∂ₓ(v²)`.
#[derive(Debug)]
struct Kdv {
    name: &'static str,
    coefficient: f64,
    nonlinear: bool,
}

impl LinearModel for Kdv {
    fn name(&self) -> &str {
        self.name
    }
    fn generator(&self, xi: f64) -> Complex64 {
        Complex64::new(0.0, self.coefficient * xi.powi(3))
    }
    fn nonlinear(&self) -> bool {
        self.nonlinear
    }
}

/// BO plus the Galilean-conjugation perturbation of ILW.
#[derive(Debug)]
struct BoPerturbed {
    delta: f64,
    reading: PerturbationReading,
}

impl LinearModel for BoPerturbed {
    fn name(&self) -> &str {
        "bo_perturbed"
    }
    fn generator(&self, xi: f64) -> Complex64 {
        PropagatorTag::Bo.generator(xi) + self.reading.symbol(xi, self.delta)
    }
    fn delta(&self) -> Option<f64> {
        Some(self.delta)
    }
}

type Builder = fn(&EquationParams) -> Result<Arc<dyn LinearModel>>;

/// Name → equation constructor.
pub struct EquationRegistry {
    builders: BTreeMap<&'static str, Builder>,
}

impl EquationRegistry {
    pub fn empty() -> Self {
        Self {
            builders: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, builder: Builder) {
        self.builders.insert(name, builder);
    }

    pub fn build(&self, name: &str, params: &EquationParams) -> Result<Arc<dyn LinearModel>> {
        let builder = self.builders.get(name).ok_or_else(|| Error::UnknownName {
            kind: "equation",
            name: name.to_string(),
            known: self.names().join(", "),
        })?;
        builder(params)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }

    /// The process-wide registry with every built-in equation.
    pub fn global() -> &'static EquationRegistry {
        static REGISTRY: OnceLock<EquationRegistry> = OnceLock::new();
        REGISTRY.get_or_init(EquationRegistry::builtin)
    }

    fn builtin() -> Self {
        let mut r = Self::empty();
        r.register("ilw", |p| ilw(p, "ilw", true, false));
        r.register("ilw_linear", |p| ilw(p, "ilw_linear", false, false));
        r.register("silw", |p| ilw(p, "silw", true, true));
        r.register("silw_linear", |p| ilw(p, "silw_linear", false, true));
        r.register("bo", |_| Ok(Arc::new(Bo { name: "bo", nonlinear: true })));
        r.register("bo_linear", |_| {
            Ok(Arc::new(Bo {
                name: "bo_linear",
                nonlinear: false,
            }))
        });
        r.register("kdv", |_| Ok(kdv("kdv", 1.0, true)));
        r.register("kdv_linear", |_| Ok(kdv("kdv_linear", 1.0, false)));
        r.register("kdv_third", |_| Ok(kdv("kdv_third", 1.0 / 3.0, true)));
        r.register("kdv_third_linear", |_| Ok(kdv("kdv_third_linear", 1.0 / 3.0, false)));
        r.register("bo_perturbed", |p| {
            Ok(Arc::new(BoPerturbed {
                delta: p.require_delta("bo_perturbed")?,
                reading: p.reading,
            }))
        });
        r
    }
}

fn ilw(p: &EquationParams, name: &'static str, nonlinear: bool, scaled: bool) -> Result<Arc<dyn LinearModel>> {
    let delta = p.require_delta(name)?;
    if scaled && delta.is_infinite() {
        return Err(Error::config(format!("{name}: delta must be finite")));
    }
    Ok(Arc::new(Ilw {
        name,
        delta,
        nonlinear,
        scaled,
    }))
}

fn kdv(name: &'static str, coefficient: f64, nonlinear: bool) -> Arc<dyn LinearModel> {
    Arc::new(Kdv {
        name,
        coefficient,
        nonlinear,
    })
}
