use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detsim::NoiseProfile;
use crate::error::{Error, Result};
use crate::reconstruct::ReconstructConfig;
use crate::segment::RefineConfig;

/// Everything tunable in the pipeline. Missing sections take their defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub noise: NoiseProfile,
    pub reconstruct: ReconstructConfig,
    pub refine: RefineConfig,
}

impl PipelineConfig {
    /// The configuration used for the gain experiments.
    pub fn standard() -> Self {
        Self { noise: NoiseProfile::standard(), ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        self.reconstruct.validate()
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = crate::json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Read a `.toml` or `.json` config file.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => PipelineConfig::from_toml(&text),
        Some("json") => PipelineConfig::from_json(&text),
        _ => Err(Error::Config(format!("{}: expected a .toml or .json file", path.display()))),
    }
}
