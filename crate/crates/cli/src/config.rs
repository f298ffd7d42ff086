//! Run configuration file.
//!
//! TOML with a fixed key set; unknown keys are rejected so typos cannot
//! silently fall back to defaults. Paths are resolved relative to the
//! config file's directory.

use std::path::{Path, PathBuf};

use otalign::trainer::{Mode, TrainConfig};
use otalign::graph::NoiseKind;
use otalign::{Error, Result};
use serde::{Deserialize, Serialize};

fn default_lr() -> f64 {
    1e-4
}
fn default_epochs() -> usize {
    50
}
fn default_inner_steps() -> usize {
    20
}
fn default_t() -> usize {
    10
}
fn default_n() -> usize {
    50
}
fn default_tol() -> f64 {
    1e-6
}
fn default_train_ratio() -> f64 {
    0.2
}
fn default_mode() -> String {
    "full".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub edges1: PathBuf,
    pub edges2: PathBuf,
    #[serde(default)]
    pub attrs1: Option<PathBuf>,
    #[serde(default)]
    pub attrs2: Option<PathBuf>,
    pub anchors: PathBuf,
    pub alpha: f64,
    pub beta: f64,
    pub gamma_p: f64,
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_inner_steps")]
    pub inner_steps: usize,
    #[serde(default = "default_t", rename = "T")]
    pub t: usize,
    #[serde(default = "default_n", rename = "N")]
    pub n: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default = "default_train_ratio")]
    pub train_ratio: f64,
    pub output_dir: PathBuf,
}

/// Parsed form of the `mode` key / `--mode` flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunMode {
    Train(Mode),
    /// Perturb the second graph before training in full mode.
    Noise { kind: NoiseKind, percent: f64 },
}

pub fn parse_mode(s: &str) -> Result<RunMode> {
    match s {
        "full" => Ok(RunMode::Train(Mode::Full)),
        "fixed-cost" => Ok(RunMode::Train(Mode::FixedCost)),
        "collapse" => Ok(RunMode::Train(Mode::Collapse)),
        other => {
            if let Some(rest) = other.strip_prefix("noise:") {
                let mut parts = rest.splitn(2, ':');
                let kind: NoiseKind = parts
                    .next()
                    .unwrap_or("")
                    .parse()?;
                let pct = parts
                    .next()
                    .ok_or_else(|| {
                        Error::Config("noise mode needs a percentage, e.g. noise:structural:5".into())
                    })?
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("invalid noise percentage in {other:?}")))?;
                Ok(RunMode::Noise { kind, percent: pct })
            } else {
                Err(Error::Config(format!(
                    "unknown mode {other:?} (expected full, fixed-cost, collapse, or noise:<kind>:<pct>)"
                )))
            }
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        })?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &PathBuf| if p.is_relative() { base.join(p) } else { p.clone() };
        cfg.edges1 = resolve(&cfg.edges1);
        cfg.edges2 = resolve(&cfg.edges2);
        cfg.attrs1 = cfg.attrs1.as_ref().map(|p| resolve(p));
        cfg.attrs2 = cfg.attrs2.as_ref().map(|p| resolve(p));
        cfg.anchors = resolve(&cfg.anchors);
        cfg.output_dir = resolve(&cfg.output_dir);
        parse_mode(&cfg.mode)?;
        Ok(cfg)
    }

    pub fn run_mode(&self) -> RunMode {
        parse_mode(&self.mode).expect("validated at load")
    }

    /// The solver-facing configuration; the training mode comes from
    /// [`RunConfig::run_mode`] (noise runs train in full mode).
    pub fn train_config(&self) -> TrainConfig {
        let mode = match self.run_mode() {
            RunMode::Train(m) => m,
            RunMode::Noise { .. } => Mode::Full,
        };
        TrainConfig {
            alpha: self.alpha,
            beta: self.beta,
            gamma_p: self.gamma_p,
            lr: self.lr,
            epochs: self.epochs,
            inner_steps: self.inner_steps,
            t_outer: self.t,
            n_sinkhorn: self.n,
            sinkhorn_tol: self.tol,
            train_ratio: self.train_ratio,
            seed: self.seed,
            mode,
            ..TrainConfig::default()
        }
    }
}
