//! Experiment configuration: defaults, `key = value` or JSON files, and
//! dotted-key overrides from the command line.

use crate::error::{Error, Result};
use crate::oracle::Part;
use crate::variational::Tolerances;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    /// `Re` or `Im` of `Q = w̄ p(w)/(1+|w|²)` for the configured polynomial.
    Holomorphic,
    /// A named polynomial in `ν`.
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Harmonic {
    One,
    Nu1,
    Nu2,
    Nu3,
    Nu1nu2,
    /// Random combination of monomials in `ν` up to `harmonic_degree`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateForm {
    /// `(β₁−2)∫|Df−Dq|² + Area[X] ≤ Area[Y]`.
    Stated,
    /// The same with the factor ¼ carried by the area formula.
    Quarter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub theta0: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub generator: GeneratorKind,
    /// Polynomial coefficients `[re, im]`, constant term first.
    pub poly: Vec<[f64; 2]>,
    pub part: Part,
    pub harmonic: Harmonic,
    pub harmonic_degree: usize,
    /// `p(ν) = c₀ + c₁ν₁ + c₂ν₂ + c₃ν₃` multiplying the bump `(1 − r²/R²)³`.
    pub bump_modulation: [f64; 4],
    pub amplitudes: Vec<f64>,
    pub ladder: Vec<f64>,
    /// Number of random fields in `verify`.
    pub random_fields: usize,
    pub estimate: EstimateForm,
    /// Allowed relative gap between discrete and shooting `β₁`.
    pub oracle_tolerance: f64,
    /// Bound on the normalised mean-curvature residual of exported EL
    /// solutions.
    pub mean_curvature_tolerance: f64,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            theta0: PI / 2.0,
            nr: 24,
            ntheta: 48,
            generator: GeneratorKind::Holomorphic,
            poly: vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
            part: Part::Re,
            harmonic: Harmonic::Nu1nu2,
            harmonic_degree: 4,
            bump_modulation: [1.0, 0.0, 0.0, 0.0],
            amplitudes: vec![0.0, 0.1, 0.2, 0.4],
            ladder: vec![0.5, 1.0, PI / 2.0, 2.0, 2.5],
            random_fields: 20,
            estimate: EstimateForm::Stated,
            oracle_tolerance: 1e-2,
            mean_curvature_tolerance: 1e-6,
            tolerances: Tolerances::default(),
            seed: 20240531,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Parse a scalar written in a `key = value` file or on the command line:
/// JSON when it parses, a handful of `pi` forms, otherwise a bare string.
fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    if let Ok(v) = serde_json::from_str::<Value>(raw) {
        return v;
    }
    let lower = raw.to_ascii_lowercase();
    if lower == "pi" {
        return Value::from(PI);
    }
    if let Some(den) = lower.strip_prefix("pi/") {
        if let Ok(d) = den.parse::<f64>() {
            return Value::from(PI / d);
        }
    }
    Value::String(raw.to_string())
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("`{key}`: `{part}` is not a table")))?;
        if i + 1 == parts.len() {
            if !obj.contains_key(*part) {
                return Err(Error::Config(format!("unknown key `{key}`")));
            }
            obj.insert((*part).to_string(), value);
            return Ok(());
        }
        node = obj
            .get_mut(*part)
            .ok_or_else(|| Error::Config(format!("unknown key `{key}`")))?;
    }
    Ok(())
}

impl ExperimentConfig {
    /// Defaults, then the optional file, then `key=value` overrides.
    pub fn resolve(file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = serde_json::to_value(Self::default()).expect("config serialises");
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            apply_text(&mut value, &text)?;
        }
        for ov in overrides {
            let (k, v) = ov
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{ov}` is not key=value")))?;
            set_path(&mut value, k.trim(), parse_value(v))?;
        }
        let cfg: Self = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.theta0 > 0.0 && self.theta0 < PI) {
            return Err(Error::InvalidDomain(self.theta0));
        }
        if self.nr < 4 || self.ntheta < 8 || self.ntheta % 2 != 0 {
            return Err(Error::Resolution {
                nr: self.nr,
                ntheta: self.ntheta,
            });
        }
        if self.poly.is_empty() || self.poly.iter().flatten().any(|c| !c.is_finite()) {
            return bad("poly needs at least one finite coefficient pair".into());
        }
        if self.amplitudes.iter().any(|t| !t.is_finite()) {
            return bad("amplitudes must be finite".into());
        }
        if self.bump_modulation.iter().any(|c| !c.is_finite()) {
            return bad("bump_modulation must be finite".into());
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.quadrature", t.quadrature),
            ("tolerances.slack", t.slack),
            ("tolerances.clamp", t.clamp),
            ("tolerances.el", t.el),
            ("tolerances.boundary", t.boundary),
            ("oracle_tolerance", self.oracle_tolerance),
            ("mean_curvature_tolerance", self.mean_curvature_tolerance),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} must be a finite non-negative number, got {v}"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serialises")
    }
}

/// A JSON object, or `key = value` lines with `#` comments.
fn apply_text(value: &mut Value, text: &str) -> Result<()> {
    if text.trim_start().starts_with('{') {
        let file: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let obj = file
            .as_object()
            .ok_or_else(|| Error::Config("config JSON must be an object".into()))?;
        for (k, v) in obj {
            merge(value, k, v.clone())?;
        }
        return Ok(());
    }
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        set_path(value, k.trim(), parse_value(v))?;
    }
    Ok(())
}

/// Nested JSON tables merge key by key; everything else replaces.
fn merge(root: &mut Value, key: &str, v: Value) -> Result<()> {
    match v {
        Value::Object(map) if root.get(key).is_some_and(Value::is_object) => {
            for (k, inner) in map {
                set_path(root, &format!("{key}.{k}"), inner)?;
            }
            Ok(())
        }
        other => set_path(root, key, other),
    }
}
