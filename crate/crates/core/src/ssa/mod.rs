//! Squirrel search over a bounded, normalised hyperparameter box.

mod moves;
mod optimize;
mod population;
mod space;
mod tune;

use thiserror::Error;

pub use moves::{glide_step, levy_relocate, mantegna_sigma, seasonal_check, smin};
pub use optimize::{expected_evaluations, optimize, optimize_observed, EvalContext, Evaluation, FitnessRecord, SsaOutcome};
pub use population::{assign_roles, init_population, Role, SquirrelPosition};
pub use space::{Dimension, Rounding, Scale, SearchSpace};
pub use tune::{candidate_fitness, tune, BudgetExceeded, TuneBudget, TuneData, TuneOutcome};

use serde::{Deserialize, Serialize};

#[derive(Debug, Error)]
pub enum SsaError {
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("invalid SSA configuration: {0}")]
    InvalidConfig(String),
    #[error("squirrel {index} has not been evaluated")]
    Unevaluated { index: usize },
    #[error("fitness evaluation failed at iteration {iteration}, member {index}, position {position:?}: {source}")]
    Fitness {
        iteration: usize,
        index: usize,
        position: Vec<f64>,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("fitness at member {index} is not a number")]
    NanFitness { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsaConfig {
    pub population: usize,
    pub iterations: usize,
    /// Gliding constant.
    pub gliding_constant: f64,
    /// Predator presence probability.
    pub predator_probability: f64,
    pub n_acorn: usize,
    pub scaling_factor: f64,
    pub levy_beta: f64,
    pub seed: u64,
}

impl Default for SsaConfig {
    fn default() -> Self {
        Self {
            population: 20,
            iterations: 30,
            gliding_constant: 1.9,
            predator_probability: 0.1,
            n_acorn: 3,
            scaling_factor: 18.0,
            levy_beta: 1.5,
            seed: 0,
        }
    }
}

impl SsaConfig {
    pub fn validate(&self) -> Result<(), SsaError> {
        let bad = |m: String| Err(SsaError::InvalidConfig(m));
        if self.population < self.n_acorn + 2 {
            return bad(format!("population {} < n_acorn + 2 = {}", self.population, self.n_acorn + 2));
        }
        if !(0.0..=1.0).contains(&self.predator_probability) {
            return bad(format!("predator_probability {} outside [0, 1]", self.predator_probability));
        }
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        if self.n_acorn == 0 {
            return bad("n_acorn must be at least 1".into());
        }
        if !(self.gliding_constant > 0.0 && self.scaling_factor > 0.0) {
            return bad("gliding_constant and scaling_factor must be positive".into());
        }
        if !(self.levy_beta > 0.0 && self.levy_beta <= 2.0) {
            return bad(format!("levy_beta {} outside (0, 2]", self.levy_beta));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SsaConfig::default().validate().unwrap();
    }

    #[test]
    fn small_population_rejected() {
        let cfg = SsaConfig { population: 4, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = SsaConfig { predator_probability: 1.5, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
