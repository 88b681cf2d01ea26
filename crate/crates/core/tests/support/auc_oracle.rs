// Brute-force pairwise AUC, independent of the sweep implementation.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `P(pos > neg) + P(pos == neg) / 2` over every positive/negative pair.
pub fn pairwise_auc(scores: &[f64], truth: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if !truth[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if truth[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Random instance of size `n`; every third instance draws scores from a
/// coarse grid so that ties are common. Both classes always present.
pub fn random_instance(n: usize, seed: u64) -> (Vec<f64>, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse = seed.is_multiple_of(3);
    let base_rate: f64 = rng.random_range(0.1..0.9);
    let mut truth: Vec<bool> = (0..n).map(|_| rng.random_bool(base_rate)).collect();
    truth[0] = true;
    truth[1] = false;
    let scores = truth
        .iter()
        .map(|&t| {
            let s: f64 = rng.random::<f64>() * 0.7 + if t { 0.3 } else { 0.0 };
            if coarse {
                (s * 10.0).round() / 10.0
            } else {
                s
            }
        })
        .collect();
    (scores, truth)
}

/// Largest |sweep − pairwise| over `instances` random instances of size `n`.
pub fn max_auc_deviation(instances: u64, n: usize) -> f64 {
    (0..instances)
        .map(|seed| {
            let (s, t) = random_instance(n, seed);
            let sweep = ids_core::metrics::roc_auc(&s, &t).unwrap().auc;
            (sweep - pairwise_auc(&s, &t)).abs()
        })
        .fold(0.0, f64::max)
}
