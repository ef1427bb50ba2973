//! Experiment configuration files (JSON).

use std::fmt;
use std::path::Path;

use reinsync::{InitSpec, ModelParams, ReinforcementFunction};
use serde::{Deserialize, Serialize};

pub const ARTIFACTS: [&str; 6] = ["trajectory", "report", "zeros", "field", "basin", "clt"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub n_agents: usize,
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
    pub f: ReinforcementFunction,
    #[serde(default = "default_offset")]
    pub n0: u64,
}

fn default_offset() -> u64 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub init: InitSpec,
    pub horizon: u64,
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub outputs: Vec<String>,
    #[serde(default)]
    pub record_every: Option<u64>,
    #[serde(default)]
    pub grid_resolution: Option<usize>,
    #[serde(default)]
    pub include_unstable_middle: bool,
}

/// A rejected configuration; `line` is 1-based when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.path, line, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Line of the first occurrence of `"key"` in `text`.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, ModelParams), ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: shown.clone(),
            line: None,
            message: format!("cannot read config: {e}"),
        })?;
        Self::parse(&text, &shown)
    }

    pub fn parse(text: &str, path: &str) -> Result<(Self, ModelParams), ConfigError> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            path: path.to_string(),
            line: (e.line() > 0).then_some(e.line()),
            message: e.to_string(),
        })?;
        let fail = |key: &str, message: String| ConfigError { path: path.to_string(), line: line_of(text, key), message };
        let model = config.validate().map_err(|(key, msg)| fail(key, msg))?;
        Ok((config, model))
    }

    /// Semantic checks; on failure returns the offending key and a message.
    fn validate(&self) -> Result<ModelParams, (&'static str, String)> {
        let m = &self.model;
        if m.n_agents == 0 {
            return Err(("n_agents", "n_agents must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&m.alpha) {
            return Err(("alpha", format!("alpha must lie in [0, 1), got {}", m.alpha)));
        }
        if !(0.0..1.0).contains(&m.beta) {
            return Err(("beta", format!("beta must lie in [0, 1), got {}", m.beta)));
        }
        if !(m.q > 0.0 && m.q <= 1.0) {
            return Err(("q", format!("q must lie in (0, 1], got {}", m.q)));
        }
        let params = ModelParams::new(m.n_agents, m.alpha, m.beta, m.q, m.f.clone())
            .map_err(|e| ("beta", e.to_string()))?
            .with_offset(m.n0)
            .map_err(|e| ("n0", e.to_string()))?;
        match &self.init {
            InitSpec::Fixed(z) if z.len() != m.n_agents => {
                return Err(("init", format!("init has {} components, expected {}", z.len(), m.n_agents)))
            }
            InitSpec::Fixed(z) if z.iter().any(|x| !(0.0..=1.0).contains(x)) => {
                return Err(("init", "init components must lie in [0, 1]".into()))
            }
            InitSpec::Constant(c) if !(0.0..=1.0).contains(c) => {
                return Err(("init", format!("init constant must lie in [0, 1], got {c}")))
            }
            _ => {}
        }
        if self.replications == 0 {
            return Err(("replications", "replications must be at least 1".into()));
        }
        if self.record_every == Some(0) {
            return Err(("record_every", "record_every must be at least 1".into()));
        }
        if let Some(r) = self.grid_resolution {
            if !(2..=reinsync::landscape::MAX_RESOLUTION).contains(&r) {
                return Err(("grid_resolution", format!("grid_resolution must lie in [2, 4096], got {r}")));
            }
        }
        if let Some(bad) = self.outputs.iter().find(|o| !ARTIFACTS.contains(&o.as_str())) {
            return Err(("outputs", format!("unknown output `{bad}`; expected one of {}", ARTIFACTS.join(", "))));
        }
        Ok(params)
    }

    /// Whether `artifact` should be written; an empty list selects everything.
    pub fn wants(&self, artifact: &str) -> bool {
        self.outputs.is_empty() || self.outputs.iter().any(|o| o == artifact)
    }
}
