//! End-to-end harnesses. Each experiment runs in f64, writes its CSV artifacts
//! into an output directory and returns a report of named checks.

mod decomposition;
mod operators;
mod profiles;

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::WeightSpec;

pub use decomposition::decomposition_check_experiment;
pub use operators::{berger_coburn_p_experiment, equivalence_experiment, toeplitz_equiv_experiment, xia_bc_experiment};
pub use profiles::{compactness_profile, fbeta_norms_experiment};

pub const SCHEMA_VERSION: u32 = 1;
pub const REPORT_FILE: &str = "report.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    XiaBc,
    FbetaNorms,
    Equivalence,
    BergerCoburnP,
    Compactness,
    ToeplitzEquiv,
    DecompositionCheck,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::XiaBc,
        ExperimentId::FbetaNorms,
        ExperimentId::Equivalence,
        ExperimentId::BergerCoburnP,
        ExperimentId::Compactness,
        ExperimentId::ToeplitzEquiv,
        ExperimentId::DecompositionCheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::XiaBc => "xia_bc",
            ExperimentId::FbetaNorms => "fbeta_norms",
            ExperimentId::Equivalence => "equivalence",
            ExperimentId::BergerCoburnP => "berger_coburn_p",
            ExperimentId::Compactness => "compactness",
            ExperimentId::ToeplitzEquiv => "toeplitz_equiv",
            ExperimentId::DecompositionCheck => "decomposition_check",
        }
    }
}

impl std::str::FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment `{s}`")))
    }
}

/// Everything an experiment reads. Fields an experiment does not use are
/// echoed but ignored.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub weight: WeightSpec<f64>,
    pub p: Vec<f64>,
    pub r: f64,
    pub m: f64,
    /// Truncation schedule for the monomial basis.
    pub n: Vec<usize>,
    /// Truncation schedule for plane integrals.
    pub rmax: Vec<f64>,
    pub beta: f64,
    pub symbols: Vec<String>,
    pub densities: Vec<String>,
    /// Samples per local ρ in plane integrals.
    pub resolution: f64,
    /// Radius of the decomposition domain; defaults by weight when absent.
    pub domain: Option<f64>,
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Symbols for the operator-side family: bounded, single-mode, compactly
/// supported or decaying.
pub const EQUIVALENCE_FAMILY: [&str; 9] = [
    "zbar_disk:1",
    "zbar_disk:2",
    "scale:2:zbar_disk:1",
    "scale:2:zbar_disk:2",
    "xia",
    "conj:xia",
    "indicator:1",
    "mode:-2:2:0:1",
    "mode:1:1:0:1",
];

impl ExperimentConfig {
    /// Defaults documented per experiment in the README.
    pub fn defaults(id: ExperimentId) -> Self {
        let mut c = ExperimentConfig {
            experiment: id,
            weight: WeightSpec::classical(),
            p: vec![1.0],
            r: 1.0,
            m: 0.5,
            n: vec![40, 80, 160],
            rmax: vec![5.0, 10.0, 20.0, 40.0],
            beta: 0.5,
            symbols: Vec::new(),
            densities: Vec::new(),
            resolution: 4.0,
            domain: None,
        };
        match id {
            ExperimentId::XiaBc => {
                c.p = vec![0.5, 1.0, 2.0];
                c.n = vec![250, 500, 1000, 2000];
            }
            ExperimentId::FbetaNorms => {}
            ExperimentId::Equivalence => {
                c.p = vec![2.0];
                c.symbols = strings(&EQUIVALENCE_FAMILY);
            }
            ExperimentId::BergerCoburnP => {
                c.p = vec![1.5, 2.0];
                c.n = vec![250, 500, 1000, 2000];
                c.symbols = strings(&EQUIVALENCE_FAMILY);
            }
            ExperimentId::Compactness => {
                c.symbols = strings(&["zbar_decay:10", "zbar", "poly:1"]);
            }
            ExperimentId::ToeplitzEquiv => {
                c.n = vec![200];
                c.densities = strings(&["indicator:0.5", "indicator:1", "indicator:2", "zero"]);
            }
            ExperimentId::DecompositionCheck => {
                c.r = 0.5;
                c.symbols = strings(&["zbar", "xia", "fbeta:0.5", "poly:1,0,2"]);
            }
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        self.weight.validate()?;
        let bad = |name: &'static str, reason: &str| Err(Error::invalid(name, reason.to_string()));
        if self.p.is_empty() || self.p.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return bad("p", "needs at least one positive, finite exponent");
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return bad("r", "must be positive");
        }
        if !(self.m > 0.0 && self.m < 1.0) {
            return bad("m", "must lie in (0, 1)");
        }
        if self.n.is_empty() || self.n.windows(2).any(|w| w[1] <= w[0]) {
            return bad("N", "schedule must be nonempty and strictly increasing");
        }
        if self.rmax.is_empty() || self.rmax[0] <= 0.0 || self.rmax.windows(2).any(|w| w[1] <= w[0]) {
            return bad("Rmax", "schedule must be positive and strictly increasing");
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta", "must lie in (0, 1)");
        }
        if !(self.resolution >= 4.0) {
            return bad("resolution", "must be at least 4 samples per ρ");
        }
        if let Some(d) = self.domain {
            if !(d > 0.0 && d.is_finite()) {
                return bad("domain", "must be positive");
            }
        }
        if self.experiment == ExperimentId::BergerCoburnP && self.p.iter().any(|p| *p <= 1.0) {
            return bad("p", "berger_coburn_p needs every p > 1");
        }
        if self.experiment == ExperimentId::FbetaNorms && self.p.iter().any(|p| *p > 1.0) {
            return bad("p", "fbeta_norms needs every p in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A soft check that did not hold.
    Warn,
    /// Recorded measurement without a verdict.
    Info,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub hard: bool,
    pub measured: Option<f64>,
    pub expected: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn flag(name: impl Into<String>, ok: bool, expected: impl Into<String>, hard: bool) -> Self {
        let status = match (ok, hard) {
            (true, _) => Status::Pass,
            (false, true) => Status::Fail,
            (false, false) => Status::Warn,
        };
        Self { name: name.into(), status, hard, measured: None, expected: expected.into(), detail: None }
    }

    /// measured ≤ limit; NaN fails.
    pub fn at_most(name: impl Into<String>, measured: f64, limit: f64, hard: bool) -> Self {
        Self::flag(name, measured <= limit, format!("<= {limit:e}"), hard).with_value(measured)
    }

    /// |measured − target| ≤ tol.
    pub fn within(name: impl Into<String>, measured: f64, target: f64, tol: f64, hard: bool) -> Self {
        Self::flag(name, (measured - target).abs() <= tol, format!("{target} ± {tol}"), hard).with_value(measured)
    }

    pub fn info(name: impl Into<String>, measured: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Info,
            hard: false,
            measured: Some(measured),
            expected: String::new(),
            detail: Some(detail.into()),
        }
    }

    pub fn with_value(mut self, v: f64) -> Self {
        self.measured = Some(v);
        self
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: ExperimentId,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
    /// Experiment-specific tables.
    pub results: serde_json::Value,
    /// Seconds since the Unix epoch; the only field that varies between runs.
    pub timestamp: u64,
}

impl ExperimentReport {
    fn new(config: &ExperimentConfig) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: config.experiment,
            config: config.clone(),
            checks: Vec::new(),
            artifacts: Vec::new(),
            results: serde_json::Value::Null,
            timestamp,
        }
    }

    /// True when every hard check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }
}

/// File-name-safe version of a symbol or density label.
pub(crate) fn slug(s: &str) -> String {
    let mut out: String = s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect();
    while out.contains("__") {
        out = out.replace("__", "_");
    }
    out.trim_matches('_').to_string()
}

pub(crate) fn is_classical(spec: &WeightSpec<f64>) -> bool {
    *spec == WeightSpec::classical()
}

/// Runs the experiment named in `config`, writing its artifacts and
/// `report.json` under `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentReport> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let report = match config.experiment {
        ExperimentId::XiaBc => xia_bc_experiment(config, out_dir),
        ExperimentId::FbetaNorms => fbeta_norms_experiment(config, out_dir),
        ExperimentId::Equivalence => equivalence_experiment(config, out_dir),
        ExperimentId::BergerCoburnP => berger_coburn_p_experiment(config, out_dir),
        ExperimentId::Compactness => compactness_profile(config, out_dir),
        ExperimentId::ToeplitzEquiv => toeplitz_equiv_experiment(config, out_dir),
        ExperimentId::DecompositionCheck => decomposition_check_experiment(config, out_dir),
    }?;
    crate::io::write_json(out_dir.join(REPORT_FILE), &report)?;
    Ok(report)
}
