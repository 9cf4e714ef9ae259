use std::fs;
use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= tolerance,
            value,
            tolerance,
            detail: format!("{value:.3e} <= {tolerance:.1e}"),
        }
    }

    /// Passes when `value >= floor`.
    pub fn at_least(name: &str, value: f64, floor: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= floor,
            value,
            tolerance: floor,
            detail: format!("{value:.3e} >= {floor:.1e}"),
        }
    }

    pub fn flag(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            value: f64::from(u8::from(passed)),
            tolerance: 1.0,
            detail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: RunConfig,
    pub version: String,
    pub regime: String,
    pub bath_tail_mass: f64,
    pub duration_seconds: f64,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub third_law: Option<Vec<ptthermo::ScanPoint>>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(dir.join("manifest.json"), text)?;
        Ok(())
    }
}
