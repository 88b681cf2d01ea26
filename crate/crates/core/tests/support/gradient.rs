#![allow(dead_code)]
//! Analytic gradients against central finite differences.

use ids_core::dataset::{ClassWeights, FeatureMatrix};
use ids_core::nn::{Architecture, ConvLstmModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-5;

/// Relative error with an absolute floor so that vanishing gradients are
/// compared on an absolute scale.
fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

fn random_instance(seed: u64) -> (ConvLstmModel, FeatureMatrix, Vec<usize>, ClassWeights) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(5..=16);
    let k = rng.random_range(2..=5);
    let arch = Architecture {
        input_len: d,
        conv_kernel: 3,
        conv_filters: rng.random_range(1..=4),
        pool_width: 2,
        lstm_units: rng.random_range(1..=8),
        class_names: (0..k).map(|i| format!("c{i}")).collect(),
        column_hash: 1,
    };
    let mut model = ConvLstmModel::init(arch, seed).unwrap();
    for p in model.params.iter_mut() {
        *p += rng.random_range(-0.3..0.3);
    }
    let n = 8;
    let x = FeatureMatrix::new(d, (0..n * d).map(|_| rng.random_range(0.0..1.0)).collect(), 1);
    let y = (0..n).map(|_| rng.random_range(0..k)).collect();
    let w = ClassWeights((0..k).map(|_| rng.random_range(0.2..3.0)).collect());
    (model, x, y, w)
}

pub fn max_gradient_error(seed: u64) -> f64 {
    let (mut model, x, y, w) = random_instance(seed);
    let rows: Vec<usize> = (0..x.n_rows).collect();
    let (_, analytic) = model.loss_and_gradient(&x, &y, &rows, &w).unwrap();
    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.iter().enumerate() {
        let orig = model.params[i];
        model.params[i] = orig + EPS;
        let up = model.loss(&x, &y, &rows, &w).unwrap();
        model.params[i] = orig - EPS;
        let down = model.loss(&x, &y, &rows, &w).unwrap();
        model.params[i] = orig;
        let numeric = (up - down) / (2.0 * EPS);
        worst = worst.max(rel_err(a, numeric));
    }
    worst
}
