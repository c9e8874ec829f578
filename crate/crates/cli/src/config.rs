//! Optional TOML run configuration. Command-line flags take precedence.
//!
//! ```toml
//! seed = 7
//! threads = 4
//! format = "csv"
//!
//! [fit]
//! steps = 3000
//! learning_rate = 0.05
//!
//! [endpoint]
//! url = "http://localhost:8000/v1/completions"
//! model = "some-model"
//!
//! [batch]
//! parallelism = 8
//!
//! [serve]
//! addr = "0.0.0.0:8080"
//! data = "sessions"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use hidden_single_core::model::FitConfig;
use hidden_single_core::prompts::{BatchOptions, EndpointConfig};

use crate::error::{CliError, Result};
use crate::files::{read_to_string, Format};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
    pub quiet: Option<bool>,
    #[serde(default)]
    pub fit: FitOverrides,
    pub endpoint: Option<EndpointConfig>,
    #[serde(default)]
    pub batch: BatchOverrides,
    #[serde(default)]
    pub serve: ServeConfig,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitOverrides {
    pub learning_rate: Option<f64>,
    pub steps: Option<usize>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub epsilon: Option<f64>,
    pub init_scale: Option<f64>,
}

impl FitOverrides {
    pub fn apply(&self, mut c: FitConfig) -> FitConfig {
        c.learning_rate = self.learning_rate.unwrap_or(c.learning_rate);
        c.steps = self.steps.unwrap_or(c.steps);
        c.beta1 = self.beta1.unwrap_or(c.beta1);
        c.beta2 = self.beta2.unwrap_or(c.beta2);
        c.epsilon = self.epsilon.unwrap_or(c.epsilon);
        c.init_scale = self.init_scale.unwrap_or(c.init_scale);
        c
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchOverrides {
    pub parallelism: Option<usize>,
    pub attempts: Option<usize>,
    pub backoff_ms: Option<u64>,
}

impl BatchOverrides {
    pub fn apply(&self, mut o: BatchOptions) -> BatchOptions {
        o.parallelism = self.parallelism.unwrap_or(o.parallelism);
        o.attempts = self.attempts.unwrap_or(o.attempts);
        o.backoff_ms = self.backoff_ms.unwrap_or(o.backoff_ms);
        o
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServeConfig {
    pub addr: Option<String>,
    pub data: Option<PathBuf>,
    pub test_mode: Option<bool>,
    pub fsync: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        toml::from_str(&read_to_string(path)?).map_err(|e| CliError::format(path, e))
    }
}
