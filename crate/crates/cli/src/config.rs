//! Run configuration read from `--config FILE`; command-line flags win over it.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use phfkit::{LogBase, PipelineConfig, PlasticParams, SearchLimits};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub t: Option<usize>,
    /// Numeric expressions such as `"2^64"`.
    pub m: Option<String>,
    pub q: Option<String>,
    pub limits: SearchLimits,
    /// Cap on families enumerated by a separation check.
    pub max_families: u64,
    pub behrend_cap: u64,
    pub greedy_cap: u64,
    pub log_base: LogBase,
    pub out: Option<PathBuf>,
    pub set_out: Option<PathBuf>,
    pub check_plasticity: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let pipeline = PipelineConfig::default();
        RunConfig {
            a: None,
            b: None,
            t: None,
            m: None,
            q: None,
            limits: SearchLimits::default(),
            max_families: 1_000_000_000,
            behrend_cap: pipeline.behrend_cap,
            greedy_cap: pipeline.greedy_cap,
            log_base: LogBase::Two,
            out: None,
            set_out: None,
            check_plasticity: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.check_plasticity {
            self.plastic_params()?;
        }
        Ok(())
    }

    pub fn plastic_params(&self) -> Result<PlasticParams<f64>> {
        let (Some(a), Some(b), Some(t)) = (self.a, self.b, self.t) else {
            anyhow::bail!("plasticity checks need a, b and t");
        };
        Ok(PlasticParams::new(a, b, t)?)
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            limits: self.limits,
            behrend_cap: self.behrend_cap,
            greedy_cap: self.greedy_cap,
            log_base: self.log_base,
        }
    }
}
