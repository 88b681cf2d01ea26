use std::error::Error;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::moves::{glide_step, levy_relocate, seasonal_check};
use super::population::{assign_roles, init_population_with};
use super::{SquirrelPosition, SsaConfig, SsaError};

/// Handed to every fitness call. `seed` is derived from the master seed,
/// the iteration and the member index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalContext {
    pub iteration: usize,
    pub index: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessRecord {
    pub iteration: usize,
    pub best_fitness: f64,
    pub best_position: Vec<f64>,
    /// Cumulative fitness evaluations.
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub iteration: usize,
    pub index: usize,
    pub coords: Vec<f64>,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsaOutcome {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// One entry per iteration.
    pub trace: Vec<FitnessRecord>,
    pub evaluations: Vec<Evaluation>,
}

impl SsaOutcome {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,best_fitness,evaluations\n");
        for r in &self.trace {
            let _ = writeln!(out, "{},{},{}", r.iteration, r.best_fitness, r.evaluations);
        }
        out
    }
}

/// Fitness calls made by [`optimize`]: the whole initial population, then
/// every squirrel except the hickory in each later iteration.
pub fn expected_evaluations(cfg: &SsaConfig) -> usize {
    cfg.population + cfg.iterations.saturating_sub(1) * (cfg.population - 1)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    splitmix(splitmix(splitmix(master) ^ a) ^ b)
}

struct Best {
    position: Vec<f64>,
    fitness: f64,
}

/// Maximise `fitness` over `[0,1]^dim`. Evaluations within an iteration
/// run in parallel and are merged by member index, so the result matches
/// a sequential run.
pub fn optimize<F, E>(dim: usize, cfg: &SsaConfig, fitness: F) -> Result<SsaOutcome, SsaError>
where
    F: Fn(&[f64], EvalContext) -> Result<f64, E> + Sync,
    E: Into<Box<dyn Error + Send + Sync>> + Send,
{
    optimize_observed(dim, cfg, fitness, |_| {})
}

/// [`optimize`], calling `observer` with each trace record as soon as it
/// exists so callers can persist progress before a later failure.
pub fn optimize_observed<F, E>(
    dim: usize,
    cfg: &SsaConfig,
    fitness: F,
    mut observer: impl FnMut(&FitnessRecord),
) -> Result<SsaOutcome, SsaError>
where
    F: Fn(&[f64], EvalContext) -> Result<f64, E> + Sync,
    E: Into<Box<dyn Error + Send + Sync>> + Send,
{
    cfg.validate()?;
    if dim == 0 {
        return Err(SsaError::InvalidConfig("search dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pop = init_population_with(cfg.population, dim, &mut rng);
    let mut best: Option<Best> = None;
    let mut log = Vec::with_capacity(expected_evaluations(cfg));
    let mut trace = Vec::with_capacity(cfg.iterations);

    for iteration in 0..cfg.iterations {
        evaluate(&mut pop, iteration, cfg.seed, &fitness, &mut log)?;
        for s in &pop {
            let f = s.fitness.expect("just evaluated");
            if best.as_ref().is_none_or(|b| f > b.fitness) {
                best = Some(Best { position: s.coords.clone(), fitness: f });
            }
        }
        let b = best.as_ref().expect("population is non-empty");
        trace.push(FitnessRecord {
            iteration,
            best_fitness: b.fitness,
            best_position: b.position.clone(),
            evaluations: log.len(),
        });
        observer(trace.last().expect("just pushed"));
        // Moves after the final evaluation would never be scored.
        if iteration + 1 < cfg.iterations {
            assign_roles(&mut pop, cfg.n_acorn)?;
            glide_step(&mut pop, cfg, &mut rng);
            if seasonal_check(&pop, iteration, cfg.iterations) {
                levy_relocate(&mut pop, cfg, &mut rng);
            }
        }
    }
    let b = best.expect("population is non-empty");
    Ok(SsaOutcome {
        best_position: b.position,
        best_fitness: b.fitness,
        trace,
        evaluations: log,
    })
}

fn evaluate<F, E>(
    pop: &mut [SquirrelPosition],
    iteration: usize,
    master: u64,
    fitness: &F,
    log: &mut Vec<Evaluation>,
) -> Result<(), SsaError>
where
    F: Fn(&[f64], EvalContext) -> Result<f64, E> + Sync,
    E: Into<Box<dyn Error + Send + Sync>> + Send,
{
    let pending: Vec<usize> = (0..pop.len()).filter(|&i| pop[i].fitness.is_none()).collect();
    let results: Vec<Result<f64, E>> = pending
        .par_iter()
        .map(|&index| {
            let ctx = EvalContext {
                iteration,
                index,
                seed: derive_seed(master, iteration as u64, index as u64),
            };
            fitness(&pop[index].coords, ctx)
        })
        .collect();
    for (index, result) in pending.into_iter().zip(results) {
        let f = result.map_err(|e| SsaError::Fitness {
            iteration,
            index,
            position: pop[index].coords.clone(),
            source: e.into(),
        })?;
        if f.is_nan() {
            return Err(SsaError::NanFitness { index });
        }
        pop[index].fitness = Some(f);
        log.push(Evaluation {
            iteration,
            index,
            coords: pop[index].coords.clone(),
            fitness: f,
        });
    }
    Ok(())
}
