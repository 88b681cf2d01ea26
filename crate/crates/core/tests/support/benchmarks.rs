// Shared by the SSA benchmark tests and the acceptance suite.
#![allow(dead_code)]

use std::convert::Infallible;

use ids_core::ssa::{optimize, EvalContext, SsaConfig, SsaOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn neg_sphere(x: &[f64], _: EvalContext) -> Result<f64, Infallible> {
    Ok(-x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>())
}

/// Negated Rastrigin with `[0,1]` mapped onto `[-5.12, 5.12]`.
pub fn neg_rastrigin(x: &[f64], _: EvalContext) -> Result<f64, Infallible> {
    let a = 10.0;
    let v: f64 = x
        .iter()
        .map(|u| {
            let z = -5.12 + 10.24 * u;
            z * z - a * (2.0 * std::f64::consts::PI * z).cos()
        })
        .sum();
    Ok(-(a * x.len() as f64 + v))
}

pub struct SphereResult {
    pub successes: usize,
    pub all_monotone: bool,
    pub worst: f64,
}

/// 5-D sphere, population 20, 100 iterations, seeds `0..runs`.
pub fn sphere_benchmark(runs: u64) -> SphereResult {
    let mut successes = 0;
    let mut all_monotone = true;
    let mut worst = 0.0f64;
    for seed in 0..runs {
        let cfg = SsaConfig { population: 20, iterations: 100, seed, ..Default::default() };
        let out = optimize(5, &cfg, neg_sphere).unwrap();
        successes += usize::from(out.best_fitness > -1e-2);
        all_monotone &= monotone(&out);
        worst = worst.min(out.best_fitness);
    }
    SphereResult { successes, all_monotone, worst }
}

pub fn monotone(out: &SsaOutcome) -> bool {
    out.trace.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness)
}

pub fn random_search(dim: usize, budget: usize, seed: u64, f: fn(&[f64], EvalContext) -> Result<f64, Infallible>) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
    let ctx = EvalContext { iteration: 0, index: 0, seed: 0 };
    (0..budget)
        .map(|_| {
            let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            f(&x, ctx).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
