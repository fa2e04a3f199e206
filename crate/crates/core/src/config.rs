//! Experiment configuration files.
//!
//! An experiment is a TOML document with one table per concern:
//!
//! ```toml
//! label = "rtm-k4"
//! seed = 1
//!
//! [model]
//! k = 4
//!
//! [training]
//! procedure = "randomized"
//! ebn0_range_db = [0.0, 12.0]
//!
//! [losses.mi_wlln]
//! enabled = true
//!
//! [evaluation]
//! ebn0_lo = 0.0
//! ebn0_hi = 12.0
//! ebn0_step = 1.0
//! ```
//!
//! Only `model.k` is required. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::evaluation::{DecoderKind, StopRule, DEFAULT_DISTANCE_TOLERANCE};
use crate::losses::LossWeights;
use crate::models::ModelConfig;
use crate::training::{ScheduleConfig, TrainConfig};
use crate::{Error, Result};

/// Inclusive Eb/N0 grid `lo, lo + step, …, hi` in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(Error::config("grid bounds must be finite"));
        }
        if !(step > 0.0) || hi < lo {
            return Err(Error::config(format!(
                "grid needs lo <= hi and step > 0, got {lo}:{hi}:{step}"
            )));
        }
        Ok(Self { lo, hi, step })
    }

    pub fn points(&self) -> Vec<f64> {
        // tolerate rounding in (hi - lo) / step
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// Parses `LO:HI:STEP`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(Error::config(format!("grid must be LO:HI:STEP, got {s:?}")));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(format!("grid value {v:?} is not a number")))
        };
        Grid::new(num(lo)?, num(hi)?, num(step)?)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationConfig {
    #[serde(default)]
    pub ebn0_lo: f64,
    #[serde(default = "default_hi")]
    pub ebn0_hi: f64,
    #[serde(default = "default_step")]
    pub ebn0_step: f64,
    #[serde(default = "default_min_errors")]
    pub min_block_errors: u64,
    #[serde(default = "default_max_trials")]
    pub max_trials: u64,
    /// Receiver; when unset, models use the neural decoder and bare
    /// codebooks use ML decoding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoder: Option<DecoderKind>,
    /// Tolerance for counting pairs at a given distance.
    #[serde(default = "default_tolerance")]
    pub distance_tolerance: f64,
}

fn default_hi() -> f64 {
    12.0
}

fn default_step() -> f64 {
    1.0
}

fn default_min_errors() -> u64 {
    StopRule::default().min_block_errors
}

fn default_max_trials() -> u64 {
    StopRule::default().max_trials
}

fn default_tolerance() -> f64 {
    DEFAULT_DISTANCE_TOLERANCE
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            ebn0_lo: 0.0,
            ebn0_hi: default_hi(),
            ebn0_step: default_step(),
            min_block_errors: default_min_errors(),
            max_trials: default_max_trials(),
            decoder: None,
            distance_tolerance: default_tolerance(),
        }
    }
}

impl EvaluationConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.ebn0_lo, self.ebn0_hi, self.ebn0_step)
            .map_err(|e| Error::config(format!("evaluation.ebn0_*: {e}")))
    }

    pub fn set_grid(&mut self, grid: Grid) {
        self.ebn0_lo = grid.lo;
        self.ebn0_hi = grid.hi;
        self.ebn0_step = grid.step;
    }

    pub fn stop_rule(&self) -> StopRule {
        StopRule {
            min_block_errors: self.min_block_errors,
            max_trials: self.max_trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_label")]
    pub label: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub model: ModelConfig,
    #[serde(default)]
    pub training: ScheduleConfig,
    #[serde(default)]
    pub losses: LossWeights,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
}

fn default_label() -> String {
    "run".to_string()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}

impl ExperimentConfig {
    pub fn new(k: usize) -> Self {
        Self {
            label: default_label(),
            seed: 0,
            output_dir: default_output_dir(),
            model: ModelConfig::new(k),
            training: ScheduleConfig::default(),
            losses: LossWeights::default(),
            evaluation: EvaluationConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            model: self.model.clone(),
            schedule: self.training.clone(),
            losses: self.losses.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.train_config().validate()?;
        self.evaluation.grid()?;
        let e = &self.evaluation;
        if e.max_trials == 0 || e.min_block_errors == 0 {
            return Err(Error::config(
                "evaluation.max_trials and evaluation.min_block_errors must be positive",
            ));
        }
        if !(e.distance_tolerance > 0.0) {
            return Err(Error::config("evaluation.distance_tolerance must be positive"));
        }
        if self.label.is_empty()
            || !self
                .label
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
        {
            return Err(Error::config(format!(
                "label must be non-empty and use only [A-Za-z0-9._-], got {:?}",
                self.label
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::TermWeight;
    use crate::models::{Architecture, PowerMode};
    use crate::training::Procedure;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_toml("[model]\nk = 4\n").unwrap();
        assert_eq!(c, ExperimentConfig::new(4));
        assert_eq!(c.training.procedure, Procedure::Randomized);
        assert_eq!(c.model.n().unwrap(), 8);
    }

    #[test]
    fn missing_k_is_named() {
        let err = ExperimentConfig::from_toml("[model]\nrate = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("`k`"), "{err}");
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::from_toml("[model]\nk = 4\nwidth = 3\n").unwrap_err();
        assert!(err.to_string().contains("width"), "{err}");
    }

    #[test]
    fn invalid_value_rejected() {
        let text = "[model]\nk = 4\n[training]\nebn0_range_db = [5.0, 1.0]\n";
        let err = ExperimentConfig::from_toml(text).unwrap_err();
        assert!(err.to_string().contains("ebn0_range_db"), "{err}");
    }

    #[test]
    fn round_trip_is_lossless() {
        let mut c = ExperimentConfig::new(3);
        c.label = "twin.a".into();
        c.seed = u64::MAX;
        c.model.architecture = Architecture::Twin;
        c.model.encoder_hidden = Some(5);
        c.model.power_mode = PowerMode::PenaltyOnly;
        c.training.procedure = Procedure::Composite;
        c.training.train_ebn0_db = 0.1 + 0.2;
        c.training.early_stop.tolerance = 1.234_567_890_123e-7;
        c.losses.mi_wlln = TermWeight::on(0.3);
        c.losses.power_penalty = TermWeight::on(2.5);
        c.losses.mi_samples = 800;
        c.evaluation.decoder = Some(DecoderKind::Ml);
        c.evaluation.ebn0_step = 0.5;
        let text = c.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:12:1".parse().unwrap();
        assert_eq!(g.points().len(), 13);
        let g: Grid = "0:1:0.1".parse().unwrap();
        assert_eq!(g.points().len(), 11);
        assert_eq!("4:4:1".parse::<Grid>().unwrap().points(), vec![4.0]);
        assert!("1:0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("a:1:1".parse::<Grid>().is_err());
    }

    #[test]
    fn bad_label_rejected() {
        assert!(ExperimentConfig::from_toml("label = \"a/b\"\n[model]\nk = 2\n").is_err());
    }
}
