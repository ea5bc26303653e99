//! The experiment config file: TOML with top-level keys and one `[params]`
//! section. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use focklab::experiments::{ExperimentConfig, ExperimentId};
use focklab::weights::WeightSpec;
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::parse::parse_weight;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentId,
    /// `classical`, `gaussian:A`, `power:M:C`, `radial-csv:PATH` or `planar-csv:PATH`.
    #[serde(default = "classical")]
    pub weight: String,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Runs are always deterministic; `false` is rejected.
    #[serde(default = "always")]
    pub deterministic: bool,
    #[serde(default)]
    pub params: Params,
}

fn classical() -> String {
    "classical".into()
}

fn always() -> bool {
    true
}

/// Overrides for the experiment defaults; omitted keys keep them.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub p: Option<Vec<f64>>,
    pub r: Option<f64>,
    pub m: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<Vec<usize>>,
    #[serde(rename = "Rmax")]
    pub rmax: Option<Vec<f64>>,
    pub beta: Option<f64>,
    pub symbols: Option<Vec<String>>,
    pub densities: Option<Vec<String>>,
    pub resolution: Option<f64>,
    pub domain: Option<f64>,
}

impl RunConfig {
    pub fn parse_str(text: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::ConfigFile { path: origin.to_string(), message: e.to_string() })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::ConfigFile { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse_str(&text, &path.display().to_string())
    }

    fn check(&self) -> Result<()> {
        if !self.deterministic {
            return Err(CliError::invalid("deterministic", "runs are always deterministic"));
        }
        if self.threads == Some(0) {
            return Err(CliError::invalid("threads", "must be at least 1"));
        }
        self.experiment_config().map(|_| ())
    }

    pub fn weight_spec(&self) -> Result<WeightSpec<f64>> {
        parse_weight(&self.weight).map_err(|e| CliError::invalid("weight", e))
    }

    /// Experiment defaults with the file's overrides applied and validated.
    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::defaults(self.experiment);
        c.weight = self.weight_spec()?;
        let p = self.params.clone();
        if let Some(v) = p.p {
            c.p = v;
        }
        if let Some(v) = p.r {
            c.r = v;
        }
        if let Some(v) = p.m {
            c.m = v;
        }
        if let Some(v) = p.n {
            c.n = v;
        }
        if let Some(v) = p.rmax {
            c.rmax = v;
        }
        if let Some(v) = p.beta {
            c.beta = v;
        }
        if let Some(v) = p.symbols {
            c.symbols = v;
        }
        if let Some(v) = p.densities {
            c.densities = v;
        }
        if let Some(v) = p.resolution {
            c.resolution = v;
        }
        if p.domain.is_some() {
            c.domain = p.domain;
        }
        c.validate().map_err(|e| match e {
            focklab::Error::InvalidParameter { name, reason } => CliError::invalid(format!("params.{name}"), reason),
            other => other.into(),
        })?;
        Ok(c)
    }
}
