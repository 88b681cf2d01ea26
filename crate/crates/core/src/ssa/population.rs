use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SsaConfig, SsaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Hickory,
    Acorn,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquirrelPosition {
    /// Normalised coordinates in `[0,1]^D`.
    pub coords: Vec<f64>,
    /// Higher is better; `None` until evaluated.
    pub fitness: Option<f64>,
    pub role: Role,
}

impl SquirrelPosition {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords, fitness: None, role: Role::Normal }
    }
}

pub fn init_population(cfg: &SsaConfig, dim: usize) -> Vec<SquirrelPosition> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    init_population_with(cfg.population, dim, &mut rng)
}

pub(crate) fn init_population_with(n: usize, dim: usize, rng: &mut impl Rng) -> Vec<SquirrelPosition> {
    (0..n)
        .map(|_| SquirrelPosition::new((0..dim).map(|_| rng.random::<f64>()).collect()))
        .collect()
}

/// Rank by fitness (descending, lower index first on ties): best is the
/// hickory, the next `n_acorn` are acorns, the rest normal.
pub fn assign_roles(pop: &mut [SquirrelPosition], n_acorn: usize) -> Result<(), SsaError> {
    let mut order = Vec::with_capacity(pop.len());
    for (i, s) in pop.iter().enumerate() {
        match s.fitness {
            Some(f) => order.push((i, f)),
            None => return Err(SsaError::Unevaluated { index: i }),
        }
    }
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for (rank, &(i, _)) in order.iter().enumerate() {
        pop[i].role = match rank {
            0 => Role::Hickory,
            r if r <= n_acorn => Role::Acorn,
            _ => Role::Normal,
        };
    }
    Ok(())
}
