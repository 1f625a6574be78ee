use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Dealias;
use crate::spectral::{Grid, SpectralField};

/// Environment variable consulted when `out_dir` is not set.
pub const OUT_DIR_ENV: &str = "ILW_LAB_OUT_DIR";
const FALLBACK_OUT_DIR: &str = "ilw-lab-out";

/// A recognised configuration key with its default value and a one-line description.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub default: &'static str,
    pub doc: &'static str,
}

pub const fn key(name: &'static str, default: &'static str, doc: &'static str) -> KeySpec {
    KeySpec { name, default, doc }
}

/// Keys accepted by every command.
pub const COMMON_KEYS: &[KeySpec] = &[
    key("seed", "0", "seed for every random draw"),
    key("out_dir", "", "output directory (default: $ILW_LAB_OUT_DIR or ./ilw-lab-out)"),
];

/// Flat `key = value` parameters of one command invocation.
///
/// Values are kept as text and parsed on access, so the echo stored in a
/// manifest reproduces the run exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Defaults, then `file` (a flat TOML table, or a manifest's `[config]`
    /// table), then `overrides`; later sources win. Unknown keys are errors.
    pub fn resolve(command: &str, keys: &[KeySpec], file: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let mut values: BTreeMap<String, String> = COMMON_KEYS
            .iter()
            .chain(keys)
            .map(|k| (k.name.to_string(), k.default.to_string()))
            .collect();
        let mut set = |k: &str, v: String| -> Result<()> {
            match values.get_mut(k) {
                Some(slot) => {
                    *slot = v;
                    Ok(())
                }
                None => Err(Error::config(format!(
                    "unknown key `{k}` for `{command}` (known: {})",
                    values.keys().cloned().collect::<Vec<_>>().join(", ")
                ))),
            }
        };
        if let Some(text) = file {
            for (k, v) in parse_file(text)? {
                set(&k, v)?;
            }
        }
        for (k, v) in overrides {
            set(k, v.clone())?;
        }
        Ok(Self {
            command: command.to_string(),
            values,
        })
    }

    fn raw(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(|s| s.trim())
            .ok_or_else(|| Error::Internal(format!("key `{key}` is not registered for `{}`", self.command)))
    }

    fn bad(key: &str, value: &str, what: &str) -> Error {
        Error::config(format!("key `{key}`: cannot parse `{value}` as {what}"))
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.raw(key)
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let v = self.raw(key)?;
        parse_real(v).ok_or_else(|| Self::bad(key, v, "a number"))
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.raw(key)?;
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',')
            .map(|x| parse_real(x.trim()).ok_or_else(|| Self::bad(key, x, "a number")))
            .collect()
    }

    pub fn u64_list(&self, key: &str) -> Result<Vec<u64>> {
        let v = self.raw(key)?;
        v.split(',')
            .map(|x| x.trim().parse().map_err(|_| Self::bad(key, x, "an integer")))
            .collect()
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let v = self.raw(key)?;
        v.parse().map_err(|_| Self::bad(key, v, "a nonnegative integer"))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        let v = self.raw(key)?;
        v.parse().map_err(|_| Self::bad(key, v, "a nonnegative integer"))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        let v = self.raw(key)?;
        v.parse().map_err(|_| Self::bad(key, v, "true or false"))
    }

    pub fn seed(&self) -> Result<u64> {
        self.u64("seed")
    }

    pub fn dealias(&self) -> Result<Dealias> {
        match self.raw("dealias")? {
            "off" => Ok(Dealias::Off),
            "two_thirds" => Ok(Dealias::TwoThirds),
            "padded" => Ok(Dealias::Padded),
            other => Err(Self::bad("dealias", other, "one of off, two_thirds, padded")),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.usize("grid.n")?, self.f64("grid.period")?)
    }

    /// Real initial data from `u0`, a comma-separated list of
    /// `cos:k:a` / `sin:k:a` terms meaning `a·cos(k·2πx/L)`.
    pub fn initial_data(&self, grid: Grid) -> Result<SpectralField> {
        let spec = self.raw("u0")?;
        let terms = parse_modes(spec).ok_or_else(|| Self::bad("u0", spec, "terms like cos:1:0.3,sin:2:0.2"))?;
        let k0 = grid.frequency_scale();
        let field = SpectralField::from_real_fn(grid, |x| {
            terms
                .iter()
                .map(|&(cos, k, a)| if cos { a * (k * k0 * x).cos() } else { a * (k * k0 * x).sin() })
                .sum()
        });
        for &(_, k, _) in &terms {
            if !grid.contains(k as i64) {
                return Err(Error::config(format!("u0: wavenumber {k} is not resolved by grid.n = {}", grid.n_modes())));
            }
        }
        Ok(field)
    }

    /// `out_dir`, else `$ILW_LAB_OUT_DIR`, else `./ilw-lab-out`.
    pub fn out_dir(&self) -> Result<PathBuf> {
        let v = self.raw("out_dir")?;
        if !v.is_empty() {
            return Ok(PathBuf::from(v));
        }
        Ok(std::env::var_os(OUT_DIR_ENV)
            .filter(|s| !s.is_empty())
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(FALLBACK_OUT_DIR)))
    }
}

/// Splits a `key=value` command-line override.
pub fn parse_override(arg: &str) -> Result<(String, String)> {
    match arg.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(Error::config(format!("expected key=value, got `{arg}`"))),
    }
}

fn parse_real(v: &str) -> Option<f64> {
    match v {
        "pi" => Some(PI),
        "2pi" => Some(2.0 * PI),
        _ => v.parse().ok().filter(|x: &f64| !x.is_nan()),
    }
}

fn parse_modes(spec: &str) -> Option<Vec<(bool, f64, f64)>> {
    spec.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let mut it = t.trim().split(':');
            let cos = match it.next()? {
                "cos" => true,
                "sin" => false,
                _ => return None,
            };
            let k: u32 = it.next()?.parse().ok()?;
            let a: f64 = it.next()?.parse().ok()?;
            if it.next().is_some() || !a.is_finite() {
                return None;
            }
            Some((cos, k as f64, a))
        })
        .collect()
}

fn parse_file(text: &str) -> Result<Vec<(String, String)>> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::config(format!("config file: {e}")))?;
    let table = match table.get("config") {
        Some(toml::Value::Table(inner)) => inner.clone(),
        _ => table,
    };
    let mut out = Vec::new();
    flatten("", &table, &mut out)?;
    Ok(out)
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, String)>) -> Result<()> {
    for (k, v) in table {
        let name = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&name, t, out)?,
            other => out.push((name.clone(), scalar_text(&name, other)?)),
        }
    }
    Ok(())
}

fn scalar_text(name: &str, v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(items) => items
            .iter()
            .map(|x| scalar_text(name, x))
            .collect::<Result<Vec<_>>>()?
            .join(","),
        _ => return Err(Error::config(format!("key `{name}`: unsupported value type"))),
    })
}
