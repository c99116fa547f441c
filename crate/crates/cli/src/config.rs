//! Run configuration: JSON file merged with command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pirl_core::advisor::HttpAdvisorConfig;
use pirl_core::env::{EnvConfig, GridDims};
use pirl_core::pare::AlignmentParams;
use pirl_core::policy::{Method, TrainConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AdvisorKind {
    Scripted,
    Http,
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdvisorSpec {
    pub kind: AdvisorKind,
    /// Query the backend every `interval` steps and reuse the reply between.
    pub interval: u32,
    pub http: HttpAdvisorConfig,
    /// Recorded responses, required for `replay`.
    pub replay_file: Option<PathBuf>,
}

impl Default for AdvisorSpec {
    fn default() -> Self {
        AdvisorSpec { kind: AdvisorKind::Scripted, interval: 1, http: HttpAdvisorConfig::default(), replay_file: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalSpec {
    pub episodes: u32,
    pub seed: u64,
}

impl Default for EvalSpec {
    fn default() -> Self {
        EvalSpec { episodes: 100, seed: 0 }
    }
}

/// Everything a run needs. The method fixes the reward-weight mode: static
/// midpoint weights for `ppo-sr`, per-episode random weights otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub method: Method,
    pub env: EnvConfig,
    pub train: TrainConfig,
    pub alignment: AlignmentParams,
    pub advisor: AdvisorSpec,
    pub eval: EvalSpec,
    pub out_dir: PathBuf,
    /// Also write per-step trajectory JSONL during training.
    pub log_trajectories: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: Method::Pirl,
            env: EnvConfig::default(),
            train: TrainConfig::default(),
            alignment: AlignmentParams::default(),
            advisor: AdvisorSpec::default(),
            eval: EvalSpec::default(),
            out_dir: PathBuf::from("runs/latest"),
            log_trajectories: false,
        }
    }
}

/// The config file itself could not be read; maps to exit code 2.
#[derive(Debug)]
pub struct MissingConfig(pub PathBuf);

impl std::fmt::Display for MissingConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config file not found or unreadable: {}", self.0.display())
    }
}

impl std::error::Error for MissingConfig {}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = fs::read_to_string(path).map_err(|_| MissingConfig(path.to_path_buf()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate().context("env")?;
        self.train.validate().context("train")?;
        self.alignment.validate().map_err(anyhow::Error::msg).context("alignment")?;
        if self.advisor.interval == 0 {
            bail!("advisor.interval must be >= 1");
        }
        if self.advisor.kind == AdvisorKind::Replay && self.advisor.replay_file.is_none() {
            bail!("advisor kind replay needs advisor.replay_file (or --replay-file)");
        }
        Ok(())
    }
}

/// Flag values that override the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Run configuration JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    /// Grid size, e.g. 15x15x3.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridDims>,
    #[arg(long)]
    pub episodes: Option<u32>,
    #[arg(long, value_enum)]
    pub advisor: Option<AdvisorKind>,
    #[arg(long)]
    pub advisor_interval: Option<u32>,
    #[arg(long)]
    pub replay_file: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

pub fn parse_grid(s: &str) -> Result<GridDims, String> {
    s.parse().map_err(|e: pirl_core::env::EnvError| e.to_string())
}

impl Overrides {
    fn apply_common(&self, cfg: &mut RunConfig) {
        if let Some(m) = self.method {
            cfg.method = m;
        }
        if let Some(g) = self.grid {
            cfg.env.dims = g;
        }
        if let Some(k) = self.advisor {
            cfg.advisor.kind = k;
        }
        if let Some(k) = self.advisor_interval {
            cfg.advisor.interval = k;
        }
        if let Some(p) = &self.replay_file {
            cfg.advisor.replay_file = Some(p.clone());
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
    }

    /// Seed and episode count refer to training.
    pub fn apply_train(&self, cfg: &mut RunConfig) {
        self.apply_common(cfg);
        if let Some(s) = self.seed {
            cfg.train.seed = s;
        }
        if let Some(n) = self.episodes {
            cfg.train.total_episodes = n;
        }
    }

    /// Seed and episode count refer to evaluation. The grid is applied by
    /// the caller, which has to scale from the training grid.
    pub fn apply_eval(&self, cfg: &mut RunConfig) {
        let grid = cfg.env.dims;
        self.apply_common(cfg);
        cfg.env.dims = grid;
        if let Some(s) = self.seed {
            cfg.eval.seed = s;
        }
        if let Some(n) = self.episodes {
            cfg.eval.episodes = n;
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
