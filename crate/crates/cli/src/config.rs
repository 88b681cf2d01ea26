//! Run configuration: one TOML file per experiment, with a few fields that
//! command-line flags may override.

use std::path::{Path, PathBuf};

use ids_core::dataset::{SplitSpec, Task};
use ids_core::nn::HyperParams;
use ids_core::ssa::{SearchSpace, SsaConfig, TuneBudget};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    pub out: PathBuf,
    pub data: DataConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub tune: TuneConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// NSL-KDD training file. When absent, `synthetic_scale` must be set.
    pub train: Option<PathBuf>,
    /// Optional separate test file (e.g. KDDTest+), reported in addition to
    /// the held-out split.
    pub test: Option<PathBuf>,
    /// Attack-name → category table; the bundled table when absent.
    pub taxonomy: Option<PathBuf>,
    /// Stratified fraction of the training file to keep.
    #[serde(default = "one")]
    pub subsample: f64,
    /// Generate a synthetic stand-in with this multiple of the KDDTrain+
    /// composition instead of reading `train`.
    pub synthetic_scale: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { train: 0.7, val: 0.15, test: 0.15 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperSource {
    /// Use the `[model]` values.
    Fixed,
    /// Use the winner written by the tune command.
    Tune,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Balanced,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub hyperparams: HyperSource,
    pub class_weighting: Weighting,
    pub conv_filters: usize,
    pub conv_kernel: usize,
    pub lstm_units: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let hp = HyperParams::default();
        Self {
            hyperparams: HyperSource::Fixed,
            class_weighting: Weighting::Balanced,
            conv_filters: hp.conv_filters,
            conv_kernel: hp.conv_kernel,
            lstm_units: hp.lstm_units,
            learning_rate: hp.learning_rate,
            batch_size: hp.batch_size,
            max_epochs: hp.max_epochs,
        }
    }
}

impl ModelConfig {
    pub fn hyperparams(&self) -> HyperParams {
        HyperParams {
            conv_filters: self.conv_filters,
            conv_kernel: self.conv_kernel,
            lstm_units: self.lstm_units,
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            max_epochs: self.max_epochs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuneConfig {
    pub population: usize,
    pub iterations: usize,
    pub gliding_constant: f64,
    pub predator_probability: f64,
    pub n_acorn: usize,
    pub scaling_factor: f64,
    pub levy_beta: f64,
    /// Epochs per candidate training run.
    pub budget_epochs: usize,
    /// Cap on training rows per candidate (stratified); 0 keeps all.
    pub max_train_rows: usize,
    pub time_limit_secs: Option<f64>,
    pub space: SearchSpace,
}

impl Default for TuneConfig {
    fn default() -> Self {
        let s = SsaConfig::default();
        let b = TuneBudget::default();
        Self {
            population: s.population,
            iterations: s.iterations,
            gliding_constant: s.gliding_constant,
            predator_probability: s.predator_probability,
            n_acorn: s.n_acorn,
            scaling_factor: s.scaling_factor,
            levy_beta: s.levy_beta,
            budget_epochs: b.max_epochs,
            max_train_rows: 2000,
            time_limit_secs: b.time_limit_secs,
            space: SearchSpace::default(),
        }
    }
}

impl TuneConfig {
    pub fn ssa(&self, seed: u64) -> SsaConfig {
        SsaConfig {
            population: self.population,
            iterations: self.iterations,
            gliding_constant: self.gliding_constant,
            predator_probability: self.predator_probability,
            n_acorn: self.n_acorn,
            scaling_factor: self.scaling_factor,
            levy_beta: self.levy_beta,
            seed,
        }
    }

    pub fn budget(&self) -> TuneBudget {
        TuneBudget {
            max_epochs: self.budget_epochs,
            time_limit_secs: self.time_limit_secs,
        }
    }
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Seeds for every random stage, all derived from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub master: u64,
    pub synthetic: u64,
    pub subsample: u64,
    pub split: u64,
    pub tune: u64,
    pub init: u64,
    pub train: u64,
}

impl Seeds {
    pub fn derive(master: u64) -> Self {
        let mix = |tag: u64| {
            let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        Self {
            master,
            synthetic: mix(1),
            subsample: mix(2),
            split: mix(3),
            tune: mix(4),
            init: mix(5),
            train: mix(6),
        }
    }
}

impl RunConfig {
    /// Reads, applies overrides and validates.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|source| CliError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })?;
        // Relative data paths are relative to the config file.
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.data.train, &mut cfg.data.test, &mut cfg.data.taxonomy].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &overrides.out {
            cfg.out = out.clone();
        } else if cfg.out.is_relative() {
            cfg.out = base.join(&cfg.out);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn seeds(&self) -> Seeds {
        Seeds::derive(self.seed)
    }

    pub fn split_spec(&self) -> Result<SplitSpec> {
        SplitSpec::new(self.split.train, self.split.val, self.split.test, self.seeds().split)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        match (&self.data.train, self.data.synthetic_scale) {
            (Some(_), Some(_)) => return bad("data.train and data.synthetic_scale are mutually exclusive".into()),
            (None, None) => return bad("set data.train, or data.synthetic_scale for a synthetic stand-in".into()),
            (None, Some(s)) if !(s > 0.0 && s <= 10.0) => return bad(format!("data.synthetic_scale {s} outside (0, 10]")),
            _ => {}
        }
        for p in [&self.data.train, &self.data.test, &self.data.taxonomy].into_iter().flatten() {
            if !p.is_file() {
                return bad(format!("file not found: {}", p.display()));
            }
        }
        if !(self.data.subsample > 0.0 && self.data.subsample <= 1.0) {
            return bad(format!("data.subsample {} outside (0, 1]", self.data.subsample));
        }
        self.split_spec()?;
        self.model
            .hyperparams()
            .validate()
            .map_err(|e| CliError::Config(format!("model: {e}")))?;
        self.tune.ssa(0).validate().map_err(|e| CliError::Config(format!("tune: {e}")))?;
        self.tune.space.validate().map_err(|e| CliError::Config(format!("tune.space: {e}")))?;
        if self.tune.budget_epochs == 0 {
            return bad("tune.budget_epochs must be positive".into());
        }
        if self.tune.time_limit_secs.is_some_and(|t| t.is_nan() || t <= 0.0) {
            return bad("tune.time_limit_secs must be positive".into());
        }
        Ok(())
    }

    pub fn class_names(&self) -> Vec<String> {
        self.task.class_names()
    }
}
