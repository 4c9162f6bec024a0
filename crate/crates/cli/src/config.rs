//! Session configuration: `key = value` files overridden by flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use kmn_core::expr::{Bindings, Expr};
use kmn_core::pde::{CoeffForm, PdeSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::parse::{parse_expression, ParseError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {message}")]
    BadValue { key: String, message: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("{field}: {source}")]
    Parse { field: String, source: ParseError },
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    /// Case key from the catalog; when set it fixes the equation.
    pub case: Option<String>,
    /// `generic` or an exact rational such as `1/2`.
    pub alpha: String,
    pub g: String,
    pub m: u32,
    pub n: u32,
    pub zeta: i8,
    pub truncation: usize,
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub seed: u64,
    /// Numeric values for symbolic parameters in oracle checks.
    pub params: String,
    /// Number of random oracle points.
    pub points: usize,
    pub out: Option<String>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            case: None,
            alpha: "generic".into(),
            g: "k".into(),
            m: 2,
            n: 3,
            zeta: 1,
            truncation: kmn_core::symmetry::DEFAULT_TRUNCATION,
            tol_rel: 1e-8,
            tol_abs: 1e-10,
            seed: 20240601,
            params: "a=1/4, b=3/10, k=7/10".into(),
            points: 20,
            out: None,
        }
    }
}

pub const KEYS: [&str; 13] = [
    "case",
    "alpha",
    "g",
    "m",
    "n",
    "zeta",
    "truncation",
    "tol-rel",
    "tol-abs",
    "seed",
    "params",
    "points",
    "out",
];

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| bad(key, e.to_string()))
}

/// A float from a decimal or an exact `p/q` expression.
pub fn numeric_value(src: &str) -> Result<f64, String> {
    if let Ok(v) = src.trim().parse::<f64>() {
        return Ok(v);
    }
    let e = parse_expression(src).map_err(|e| e.to_string())?;
    e.as_num()
        .map(|r| r.to_f64())
        .ok_or_else(|| format!("`{src}` is not a number"))
}

impl SessionConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "case" => self.case = (!v.is_empty()).then(|| v.to_string()),
            "alpha" => self.alpha = v.to_string(),
            "g" => self.g = v.to_string(),
            "m" => self.m = parse_num(key, v)?,
            "n" => self.n = parse_num(key, v)?,
            "zeta" => self.zeta = parse_num(key, v)?,
            "truncation" => self.truncation = parse_num(key, v)?,
            "tol-rel" => self.tol_rel = parse_num(key, v)?,
            "tol-abs" => self.tol_abs = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "params" => self.params = v.to_string(),
            "points" => self.points = parse_num(key, v)?,
            "out" => self.out = (!v.is_empty()).then(|| v.to_string()),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "case" => self.case.clone().unwrap_or_default(),
            "alpha" => self.alpha.clone(),
            "g" => self.g.clone(),
            "m" => self.m.to_string(),
            "n" => self.n.to_string(),
            "zeta" => self.zeta.to_string(),
            "truncation" => self.truncation.to_string(),
            "tol-rel" => format!("{:e}", self.tol_rel),
            "tol-abs" => format!("{:e}", self.tol_abs),
            "seed" => self.seed.to_string(),
            "params" => self.params.clone(),
            "points" => self.points.to_string(),
            "out" => self.out.clone().unwrap_or_default(),
            _ => return None,
        })
    }

    /// Reads `key = value` lines on top of the defaults. `#` starts a comment.
    pub fn from_text(src: &str) -> Result<Self, ConfigError> {
        let mut cfg = SessionConfig::default();
        cfg.apply_text(src)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, src: &str) -> Result<(), ConfigError> {
        for (i, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for k in KEYS {
            writeln!(out, "{k} = {}", self.get(k).expect("listed key")).expect("string write");
        }
        out
    }

    /// Every key with its value, for echoing into reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        KEYS.iter()
            .map(|k| (k.to_string(), self.get(k).expect("listed key")))
            .collect()
    }

    pub fn alpha_expr(&self) -> Result<Expr, ConfigError> {
        if self.alpha == "generic" {
            return Ok(Expr::sym("a"));
        }
        let e = parse_expression(&self.alpha).map_err(|source| ConfigError::Parse {
            field: "alpha".into(),
            source,
        })?;
        if e.as_num().is_none() {
            return Err(bad("alpha", "expected `generic` or an exact rational such as 1/2"));
        }
        Ok(e)
    }

    /// The order as a float; decimals are accepted here and `generic` takes
    /// the value of `a` from the parameters.
    pub fn alpha_value(&self) -> Result<f64, ConfigError> {
        if self.alpha == "generic" {
            return self
                .params()?
                .get("a")
                .copied()
                .ok_or_else(|| bad("params", "generic order needs a value for `a`"));
        }
        numeric_value(&self.alpha).map_err(|m| bad("alpha", m))
    }

    pub fn g_form(&self) -> Result<CoeffForm, ConfigError> {
        let e = parse_expression(&self.g).map_err(|source| ConfigError::Parse {
            field: "g".into(),
            source,
        })?;
        CoeffForm::recognize(&e).map_err(|err| bad("g", err.to_string()))
    }

    pub fn spec(&self) -> Result<PdeSpec, ConfigError> {
        PdeSpec::new(self.alpha_expr()?, self.m, self.n, self.zeta, self.g_form()?)
            .map_err(|e| bad("equation", e.to_string()))
    }

    pub fn params(&self) -> Result<Bindings, ConfigError> {
        let mut out = Bindings::new();
        for item in self.params.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| bad("params", format!("`{item}` is not name=value")))?;
            let value = numeric_value(v).map_err(|m| bad("params", m))?;
            out.insert(k.trim().to_string(), value);
        }
        Ok(out)
    }

    /// Seeded points `(x, t)` uniform in `[0.5, 2]^2`.
    pub fn sample_points(&self) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.points)
            .map(|_| (rng.gen_range(0.5..=2.0), rng.gen_range(0.5..=2.0)))
            .collect()
    }
}
