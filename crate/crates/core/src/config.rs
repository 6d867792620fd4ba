//! The aggregated run configuration, read from a single JSON document.
//!
//! Every section and every field is optional; missing values take the
//! defaults of the mission, uncertainty, network and hyperparameter types.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::astro::MissionConfig;
use crate::error::{Error, Result};
use crate::policy::NetworkSpec;
use crate::ppo::HyperParams;
use crate::uncertainty::UncertaintyConfig;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HELIOS_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mission: MissionConfig,
    pub uncertainty: UncertaintyConfig,
    pub hyper: HyperParams,
    pub network: NetworkSpec,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mission: MissionConfig::default(),
            uncertainty: UncertaintyConfig::default(),
            hyper: HyperParams::default(),
            network: NetworkSpec::default(),
            seed: 0,
            output_dir: PathBuf::from("runs"),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.mission.validate()?;
        self.uncertainty.validate()?;
        self.hyper.validate()?;
        self.network.validate()?;
        if self.network.input_dim != crate::env::OBS_DIM || self.network.policy_out != crate::env::ACTION_DIM {
            return Err(Error::InvalidConfig(format!(
                "network must map {} observations to {} actions",
                crate::env::OBS_DIM,
                crate::env::ACTION_DIM
            )));
        }
        Ok(())
    }
}

/// Worker count: `wanted`, capped by `HELIOS_THREADS` when set to a positive
/// integer, and by the machine's parallelism.
pub fn worker_threads(wanted: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or(available);
    wanted.min(cap).max(1)
}
