//! TOML run configuration with `[run]`, `[problem]`, `[llm]` and `[dsl_limits]` sections.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{ExecLimits, SyntaxTree};
use crate::evolution::RunConfig;
use crate::operators::{ChatClient, EndpointConfig, MockGenerator, MockTask, OffspringSource};
use crate::problem::bpp::{generate_weibull_instance, BppEnvironment, UnusedBinRule};
use crate::problem::tsp::{load_reference_lengths, load_tsplib, GlsConfig, TspEnvironment};
use crate::problem::{EvalError, Evaluation, ObjectiveMode, ProblemEnvironment, TaskSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config `{path}`: {message}")]
    Read { path: PathBuf, message: String },
    #[error("invalid config `{path}`: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{0}")]
    Setup(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorMode {
    Endpoint,
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub run: RunConfig,
    pub problem: ProblemConfig,
    pub llm: LlmConfig,
    #[serde(default)]
    pub dsl_limits: DslLimits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemConfig {
    Bpp(BppProblem),
    Tsp(TspProblem),
}

/// Weibull-distributed online bin packing instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BppProblem {
    pub instances: usize,
    pub items: usize,
    pub capacity: u32,
    #[serde(default)]
    pub instance_seed: u64,
    #[serde(default)]
    pub unused_bin_rule: UnusedBinRule,
}

/// Either generated uniform instances or TSPLIB files, each with a reference length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspProblem {
    #[serde(default)]
    pub instances: usize,
    #[serde(default)]
    pub nodes: usize,
    #[serde(default)]
    pub instance_seed: u64,
    /// TSPLIB files used instead of generated instances; relative to the config file.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tsplib_files: Vec<PathBuf>,
    /// `name length` lines; relative to the config file.
    pub reference_file: PathBuf,
    pub max_iters: usize,
    pub time_budget_secs: f64,
    #[serde(default)]
    pub restart_from_nearest_neighbor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmConfig {
    pub mode: GeneratorMode,
    #[serde(default)]
    pub base_url: String,
    #[serde(default)]
    pub model_name: String,
    #[serde(default = "default_key_env")]
    pub api_key_env_name: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub initial_backoff_secs: f64,
    /// Fraction of malformed mock responses.
    #[serde(default = "default_malformed_rate")]
    pub malformed_rate: f64,
}

fn default_key_env() -> String {
    "OPENAI_API_KEY".into()
}

fn default_temperature() -> f64 {
    1.0
}

fn default_timeout() -> f64 {
    60.0
}

fn default_retries() -> u32 {
    3
}

fn default_backoff() -> f64 {
    1.0
}

fn default_malformed_rate() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DslLimits {
    pub max_steps: u64,
    pub max_loop_total: u64,
}

impl Default for DslLimits {
    fn default() -> Self {
        let d = ExecLimits::default();
        Self {
            max_steps: d.max_steps,
            max_loop_total: d.max_loop_total,
        }
    }
}

/// The configured problem.
#[derive(Debug, Clone)]
pub enum Environment {
    Bpp(BppEnvironment),
    Tsp(TspEnvironment),
}

impl ProblemEnvironment for Environment {
    fn task(&self) -> &TaskSpec {
        match self {
            Environment::Bpp(e) => e.task(),
            Environment::Tsp(e) => e.task(),
        }
    }

    fn evaluate(&self, tree: &SyntaxTree, mode: ObjectiveMode) -> Result<Evaluation, EvalError> {
        match self {
            Environment::Bpp(e) => e.evaluate(tree, mode),
            Environment::Tsp(e) => e.evaluate(tree, mode),
        }
    }
}

impl Config {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let invalid = |message: String| ConfigError::Invalid {
            path: path.to_path_buf(),
            message,
        };
        let config: Config = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        config.run.validate().map_err(|e| invalid(e.to_string()))?;
        config.limits().map_err(invalid)?;
        if let ProblemConfig::Bpp(b) = &config.problem {
            if b.instances == 0 || b.items == 0 || b.capacity == 0 {
                return Err(invalid("bpp needs positive `instances`, `items` and `capacity`".into()));
            }
        }
        if let ProblemConfig::Tsp(t) = &config.problem {
            if t.tsplib_files.is_empty() && (t.instances == 0 || t.nodes < 3) {
                return Err(invalid("tsp needs `tsplib_files` or `instances` >= 1 with `nodes` >= 3".into()));
            }
            if !(t.time_budget_secs > 0.0) || !t.time_budget_secs.is_finite() {
                return Err(invalid("`time_budget_secs` must be positive".into()));
            }
        }
        Ok(config)
    }

    /// Reads `path`; relative data paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut config = Self::parse(&text, path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let ProblemConfig::Tsp(t) = &mut config.problem {
            t.reference_file = base.join(&t.reference_file);
            for f in &mut t.tsplib_files {
                *f = base.join(&*f);
            }
        }
        Ok(config)
    }

    pub fn limits(&self) -> Result<ExecLimits, String> {
        ExecLimits::new(self.dsl_limits.max_steps, self.dsl_limits.max_loop_total)
            .ok_or_else(|| "dsl limits must be positive".to_string())
    }

    pub fn problem_name(&self) -> &'static str {
        match self.problem {
            ProblemConfig::Bpp(_) => "bpp",
            ProblemConfig::Tsp(_) => "tsp",
        }
    }

    pub fn environment(&self) -> Result<Environment, ConfigError> {
        let limits = self.limits().map_err(ConfigError::Setup)?;
        match &self.problem {
            ProblemConfig::Bpp(b) => {
                let instances = (0..b.instances as u64)
                    .map(|k| generate_weibull_instance(b.items, b.capacity, b.instance_seed + k))
                    .collect();
                Ok(Environment::Bpp(BppEnvironment::new(instances, limits, b.unused_bin_rule)))
            }
            ProblemConfig::Tsp(t) => {
                let setup = |e: EvalError| ConfigError::Setup(e.to_string());
                let refs = load_reference_lengths(&t.reference_file).map_err(setup)?;
                let gls = GlsConfig {
                    max_iters: t.max_iters,
                    time_budget: Duration::from_secs_f64(t.time_budget_secs),
                    restart_from_nearest_neighbor: t.restart_from_nearest_neighbor,
                };
                if t.tsplib_files.is_empty() {
                    let env = TspEnvironment::uniform(t.instances, t.nodes, t.instance_seed, &refs, gls, limits)
                        .map_err(setup)?;
                    return Ok(Environment::Tsp(env));
                }
                let mut instances = Vec::new();
                let mut lengths = Vec::new();
                for f in &t.tsplib_files {
                    let inst = load_tsplib(f).map_err(|e| ConfigError::Setup(format!("{}: {e}", f.display())))?;
                    let length = refs
                        .get(inst.name())
                        .copied()
                        .ok_or_else(|| ConfigError::Setup(format!("no reference length for `{}`", inst.name())))?;
                    instances.push(inst);
                    lengths.push(length);
                }
                Ok(Environment::Tsp(TspEnvironment::new(instances, lengths, gls, limits).map_err(setup)?))
            }
        }
    }

    pub fn generator(&self) -> Result<Box<dyn OffspringSource>, ConfigError> {
        match self.llm.mode {
            GeneratorMode::Mock => {
                let task = match self.problem {
                    ProblemConfig::Bpp(_) => MockTask::Bpp,
                    ProblemConfig::Tsp(_) => MockTask::Tsp,
                };
                Ok(Box::new(MockGenerator::new(task).with_malformed_rate(self.llm.malformed_rate)))
            }
            GeneratorMode::Endpoint => {
                let endpoint = EndpointConfig {
                    base_url: self.llm.base_url.clone(),
                    model_name: self.llm.model_name.clone(),
                    api_key_env_name: self.llm.api_key_env_name.clone(),
                    temperature: self.llm.temperature,
                    timeout_secs: self.llm.timeout_secs,
                    max_retries: self.llm.max_retries,
                    initial_backoff_secs: self.llm.initial_backoff_secs,
                };
                let client = ChatClient::from_env(endpoint).map_err(|e| ConfigError::Setup(e.to_string()))?;
                Ok(Box::new(client))
            }
        }
    }
}
