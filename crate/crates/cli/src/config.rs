use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ptthermo::{InitialState, PhiConvention, Scenario};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Run configuration as read from JSON. Field names are the file keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub r: f64,
    pub s: f64,
    pub g: f64,
    pub omega_c: f64,
    pub d_bath: usize,
    pub temperature: f64,
    pub initial_state: InitialState,
    pub t_max: f64,
    pub n_steps: usize,
    pub output_dir: PathBuf,
    pub phi_convention: PhiConvention,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_scenario(&Scenario::default(), PathBuf::from("out"))
    }
}

impl RunConfig {
    pub fn from_scenario(s: &Scenario, output_dir: PathBuf) -> Self {
        Self {
            r: s.r,
            s: s.s,
            g: s.g,
            omega_c: s.omega_c,
            d_bath: s.d_bath,
            temperature: s.temperature,
            initial_state: s.initial_state,
            t_max: s.t_max,
            n_steps: s.n_steps,
            output_dir,
            phi_convention: s.phi_convention,
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            r: self.r,
            s: self.s,
            g: self.g,
            omega_c: self.omega_c,
            d_bath: self.d_bath,
            temperature: self.temperature,
            initial_state: self.initial_state,
            t_max: self.t_max,
            n_steps: self.n_steps,
            phi_convention: self.phi_convention,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Applies a `key=value` override. Values parse as JSON, falling back to a bare string.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let Some((key, raw)) = spec.split_once('=') else {
            bail!("override `{spec}` is not of the form key=value");
        };
        let key = key.trim();
        let raw = raw.trim();
        let value =
            serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.into()));
        let mut map = match serde_json::to_value(&*self)? {
            Value::Object(map) => map,
            _ => unreachable!("config serializes to an object"),
        };
        if !map.contains_key(key) {
            bail!("unknown config key `{key}`");
        }
        map.insert(key.to_string(), value);
        *self = serde_json::from_value(Value::Object(map))
            .with_context(|| format!("invalid value for `{key}`: {raw}"))?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 2 {
            bail!("n_steps must be at least 2, got {}", self.n_steps);
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            bail!("t_max must be positive, got {}", self.t_max);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let mut c = RunConfig::default();
        c.apply_override("r=0.5").unwrap();
        c.apply_override("initial_state=ground").unwrap();
        c.apply_override("output_dir=/tmp/x").unwrap();
        assert_eq!(c.r, 0.5);
        assert_eq!(c.initial_state, InitialState::Ground);
        assert_eq!(c.output_dir, PathBuf::from("/tmp/x"));
        assert!(c.apply_override("bogus=1").is_err());
        assert!(c.apply_override("d_bath=-3").is_err());
        assert!(c.apply_override("r").is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"r": 0.2, "extra": true}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"r": 0.2}"#).unwrap();
        assert_eq!(c.n_steps, 400);
    }
}
