use std::error::Error;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::optimize::{derive_seed, optimize_observed, FitnessRecord, SsaOutcome};
use super::{SearchSpace, SsaConfig, SsaError};
use crate::dataset::ClassWeights;
use crate::metrics::{class_report, confusion};
use crate::nn::{train, Architecture, ConvLstmModel, HyperParams, LabeledSet};

/// Training effort spent on each candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneBudget {
    pub max_epochs: usize,
    /// Wall-clock limit for the whole search; exceeding it fails the next
    /// candidate evaluation.
    pub time_limit_secs: Option<f64>,
}

impl Default for TuneBudget {
    fn default() -> Self {
        Self { max_epochs: 3, time_limit_secs: None }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TuneData<'a> {
    pub train: LabeledSet<'a>,
    pub val: LabeledSet<'a>,
    pub class_names: &'a [String],
    pub weights: &'a ClassWeights,
}

#[derive(Debug, thiserror::Error)]
#[error("tuning time budget of {0} s exceeded")]
pub struct BudgetExceeded(pub f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    /// Winning hyperparameters with the full epoch budget of `base`.
    pub best: HyperParams,
    pub best_fitness: f64,
    pub search: SsaOutcome,
}

/// Seed for a candidate's training run. Keyed on the decoded
/// hyperparameters so identical positions always score identically.
fn candidate_seed(master: u64, hp: &HyperParams) -> u64 {
    derive_seed(
        master,
        ((hp.conv_filters as u64) << 32) | hp.lstm_units as u64,
        hp.learning_rate.to_bits(),
    )
}

/// Validation weighted-F1 of a budgeted training run.
pub fn candidate_fitness(
    hp: &HyperParams,
    train_set: LabeledSet<'_>,
    val_set: LabeledSet<'_>,
    class_names: &[String],
    weights: &ClassWeights,
    seed: u64,
) -> Result<f64, Box<dyn Error + Send + Sync>> {
    hp.validate()?;
    let arch = Architecture::from_hyper(
        hp,
        train_set.features.n_cols,
        class_names.to_vec(),
        train_set.features.column_hash,
    );
    let model = ConvLstmModel::init(arch, seed)?;
    let (model, _) = train(model, train_set, val_set, hp, weights, seed ^ 0x5eed)?;
    let pred = model.predict(val_set.features)?;
    let cm = confusion(val_set.labels, &pred, class_names)?;
    Ok(class_report(&cm)?.weighted_f1)
}

pub fn tune(
    data: &TuneData<'_>,
    base: &HyperParams,
    space: &SearchSpace,
    cfg: &SsaConfig,
    budget: TuneBudget,
    observer: impl FnMut(&FitnessRecord),
) -> Result<TuneOutcome, SsaError> {
    space.validate()?;
    if budget.max_epochs == 0 {
        return Err(SsaError::InvalidConfig("tuning budget needs at least one epoch".into()));
    }
    let start = Instant::now();
    let fitness = |coords: &[f64], _ctx| -> Result<f64, Box<dyn Error + Send + Sync>> {
        if let Some(limit) = budget.time_limit_secs {
            if start.elapsed() > Duration::from_secs_f64(limit) {
                return Err(Box::new(BudgetExceeded(limit)));
            }
        }
        let hp = HyperParams {
            max_epochs: budget.max_epochs,
            ..space.decode(coords, base)
        };
        let seed = candidate_seed(cfg.seed, &hp);
        candidate_fitness(&hp, data.train, data.val, data.class_names, data.weights, seed)
    };
    let search = optimize_observed(SearchSpace::DIM, cfg, fitness, observer)?;
    Ok(TuneOutcome {
        best: space.decode(&search.best_position, base),
        best_fitness: search.best_fitness,
        search,
    })
}
