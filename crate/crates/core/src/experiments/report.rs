use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version tag recorded in every report and manifest.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), "-", env!("CARGO_PKG_VERSION"));

/// A pass/fail rule over the numbers stored in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Check {
    /// `metric` strictly decreasing along the finite parameters, in grid order.
    StrictlyDecreasing { metric: String },
    /// `metric[last finite] ≤ factor · metric[first]`.
    LastOverFirstAtMost { metric: String, factor: f64 },
    /// Every entry of `metric` at an infinite parameter is `≤ bound`.
    SentinelAtMost { metric: String, bound: f64 },
    /// `max(metric) ≤ bound`.
    MaxAtMost { metric: String, bound: f64 },
    /// `max |a − b| ≤ bound`.
    AgreeWithin { a: String, b: String, bound: f64 },
    /// `lo ≤ slopes[slope] ≤ hi`.
    SlopeInRange { slope: String, lo: f64, hi: f64 },
    /// `slopes[slope] ≤ bound`.
    SlopeAtMost { slope: String, bound: f64 },
    /// `|scalars[scalar] − target| ≤ tol`.
    ScalarNear { scalar: String, target: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    #[serde(flatten)]
    pub check: Check,
}

impl Criterion {
    pub fn new(name: impl Into<String>, check: Check) -> Self {
        Self {
            name: name.into(),
            check,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub criterion: String,
    pub passed: bool,
    /// The quantity compared against the threshold.
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    pub seed: u64,
    /// Echo of the parameters the experiment was called with.
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn new(seed: u64, config: serde_json::Value) -> Self {
        Self {
            code_version: CODE_VERSION.to_string(),
            seed,
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    /// Name of the scanned parameter (`"delta"`, `"N"`, …).
    pub parameter: String,
    /// The parameter grid; `+∞` is allowed and serialized as `"inf"`.
    #[serde(with = "extended_reals")]
    pub params: Vec<f64>,
    /// Nonnegative per-parameter metrics, each aligned with `params`.
    pub metrics: BTreeMap<String, Vec<f64>>,
    pub slopes: BTreeMap<String, f64>,
    pub scalars: BTreeMap<String, f64>,
    pub criteria: Vec<Criterion>,
    pub verdicts: Vec<Verdict>,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, parameter: impl Into<String>, params: Vec<f64>, provenance: Provenance) -> Self {
        Self {
            experiment: experiment.into(),
            parameter: parameter.into(),
            params,
            metrics: BTreeMap::new(),
            slopes: BTreeMap::new(),
            scalars: BTreeMap::new(),
            criteria: Vec::new(),
            verdicts: Vec::new(),
            provenance,
        }
    }

    pub fn metric(&self, name: &str) -> Result<&[f64]> {
        self.metrics
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Format(format!("report `{}` has no metric `{name}`", self.experiment)))
    }

    /// Recomputes every verdict from the stored numbers.
    pub fn evaluate(&self) -> Result<Vec<Verdict>> {
        self.criteria.iter().map(|c| self.judge(c)).collect()
    }

    /// Stores the output of [`evaluate`](Self::evaluate).
    pub fn finalize(mut self) -> Result<Self> {
        self.validate()?;
        self.verdicts = self.evaluate()?;
        Ok(self)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Shape and sign invariants: metrics aligned with `params`, finite and
    /// nonnegative; slopes and scalars finite; no NaN parameters.
    pub fn validate(&self) -> Result<()> {
        if self.params.iter().any(|p| p.is_nan()) {
            return Err(Error::Format("parameter grid contains NaN".into()));
        }
        for (name, values) in &self.metrics {
            if values.len() != self.params.len() {
                return Err(Error::Format(format!(
                    "metric `{name}` has {} entries for {} parameters",
                    values.len(),
                    self.params.len()
                )));
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::Format(format!("metric `{name}` contains {v}")));
            }
        }
        for (kind, map) in [("slope", &self.slopes), ("scalar", &self.scalars)] {
            if let Some((k, v)) = map.iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::Format(format!("{kind} `{k}` is {v}")));
            }
        }
        for v in &self.verdicts {
            if v.observed.is_nan() {
                return Err(Error::Format(format!("verdict `{}` observed NaN", v.criterion)));
            }
        }
        Ok(())
    }

    fn finite_values(&self, metric: &str) -> Result<Vec<f64>> {
        Ok(self
            .params
            .iter()
            .zip(self.metric(metric)?)
            .filter(|(p, _)| p.is_finite())
            .map(|(_, v)| *v)
            .collect())
    }

    fn judge(&self, c: &Criterion) -> Result<Verdict> {
        let (passed, observed) = match &c.check {
            Check::StrictlyDecreasing { metric } => {
                let v = self.finite_values(metric)?;
                let worst = v.windows(2).map(|w| ratio(w[1], w[0])).fold(0.0, f64::max);
                (v.windows(2).all(|w| w[1] < w[0]), worst)
            }
            Check::LastOverFirstAtMost { metric, factor } => {
                let v = self.finite_values(metric)?;
                match (v.first(), v.last()) {
                    (Some(a), Some(b)) if v.len() >= 2 => {
                        let r = ratio(*b, *a);
                        (r <= *factor, r)
                    }
                    _ => (false, f64::MAX),
                }
            }
            Check::SentinelAtMost { metric, bound } => {
                let v: Vec<f64> = self
                    .params
                    .iter()
                    .zip(self.metric(metric)?)
                    .filter(|(p, _)| p.is_infinite())
                    .map(|(_, v)| *v)
                    .collect();
                let m = v.iter().copied().fold(0.0, f64::max);
                (!v.is_empty() && m <= *bound, m)
            }
            Check::MaxAtMost { metric, bound } => {
                let m = self.metric(metric)?.iter().copied().fold(0.0, f64::max);
                (m <= *bound, m)
            }
            Check::AgreeWithin { a, b, bound } => {
                let m = self
                    .metric(a)?
                    .iter()
                    .zip(self.metric(b)?)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                (m <= *bound, m)
            }
            Check::SlopeInRange { slope, lo, hi } => {
                let v = *self
                    .slopes
                    .get(slope)
                    .ok_or_else(|| Error::Format(format!("report has no slope `{slope}`")))?;
                (v >= *lo && v <= *hi, v)
            }
            Check::SlopeAtMost { slope, bound } => {
                let v = *self
                    .slopes
                    .get(slope)
                    .ok_or_else(|| Error::Format(format!("report has no slope `{slope}`")))?;
                (v <= *bound, v)
            }
            Check::ScalarNear { scalar, target, tol } => {
                let v = *self
                    .scalars
                    .get(scalar)
                    .ok_or_else(|| Error::Format(format!("report has no scalar `{scalar}`")))?;
                ((v - target).abs() <= *tol, v)
            }
        };
        Ok(Verdict {
            criterion: c.name.clone(),
            passed,
            observed,
        })
    }
}

/// `a/b`, saturated so that verdicts stay JSON-representable.
fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        (a / b).min(f64::MAX)
    } else if a == 0.0 {
        1.0
    } else {
        f64::MAX
    }
}

/// `f64` sequences where `±∞` round-trip through JSON as strings.
mod extended_reals {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Tag(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|x| {
                if x.is_infinite() {
                    Repr::Tag(if *x > 0.0 { "inf" } else { "-inf" }.into())
                } else {
                    Repr::Num(*x)
                }
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(|r| match r {
                Repr::Num(x) => Ok(x),
                Repr::Tag(t) if t == "inf" => Ok(f64::INFINITY),
                Repr::Tag(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
                Repr::Tag(t) => Err(D::Error::custom(format!("invalid parameter `{t}`"))),
            })
            .collect()
    }
}
