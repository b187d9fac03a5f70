//! Study configuration: the search space and the constants held fixed
//! across every trial. Stored as TOML; every field is optional.

use std::fs;
use std::path::Path;

use kgsens_core::audit::DEFAULT_LEAKAGE_THRESHOLD;
use kgsens_core::kge::FixedSettings;
use kgsens_core::sampler::{study_space, HyperparameterSpace};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The configuration shipped in `config/study.toml`.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("../config/study.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub leakage_threshold: f64,
    pub fixed: FixedSettings,
    pub space: HyperparameterSpace,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self { leakage_threshold: DEFAULT_LEAKAGE_THRESHOLD, fixed: FixedSettings::default(), space: study_space() }
    }
}

impl StudyConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        let cfg: StudyConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.space.validate().map_err(|e| e.to_string())?;
        if !(cfg.leakage_threshold > 0.0 && cfg.leakage_threshold <= 1.0) {
            return Err(format!("leakage_threshold {} not in (0, 1]", cfg.leakage_threshold));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|m| Error::format(path, m))
    }

    /// `path` if given, otherwise the built-in defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}
