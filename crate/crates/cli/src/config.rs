//! Pipeline settings, read from TOML and overridden by command-line flags.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use golfopt_core::builder::Discretization;
use golfopt_core::ssp::{DEFAULT_EPSILON, DEFAULT_MAX_ITERS};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// End of the data window. Defaults to the latest record date.
    pub reference_date: Option<NaiveDate>,
    /// Length of the data window in months.
    pub months: u32,
    pub discretization: Discretization,
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub paths: Paths,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub courses: Option<PathBuf>,
    pub policies: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            reference_date: None,
            months: 12,
            discretization: Discretization::default(),
            epsilon: DEFAULT_EPSILON,
            max_iters: DEFAULT_MAX_ITERS,
            seed: 0,
            paths: Paths::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::user(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.discretization
            .validate()
            .map_err(|e| CliError::user(e.to_string()))?;
        if !(self.epsilon > 0.0) {
            return Err(CliError::user(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.months == 0 {
            return Err(CliError::user("months must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(CliError::user("max_iters must be at least 1"));
        }
        Ok(())
    }
}
