//! Training-dynamics properties of the network.

use ids_core::dataset::{ClassWeights, FeatureMatrix};
use ids_core::nn::{Architecture, ConvLstmModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Loss after each of `steps` plain full-batch gradient steps.
fn descent_losses(seed: u64, steps: usize, lr: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (d, k, n) = (10, 3, 12);
    let arch = Architecture {
        input_len: d,
        conv_kernel: 3,
        conv_filters: 4,
        pool_width: 2,
        lstm_units: 6,
        class_names: (0..k).map(|i| format!("c{i}")).collect(),
        column_hash: 1,
    };
    let mut model = ConvLstmModel::init(arch, seed).unwrap();
    let x = FeatureMatrix::new(d, (0..n * d).map(|_| rng.random_range(0.0..1.0)).collect(), 1);
    let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let w = ClassWeights((0..k).map(|_| rng.random_range(0.5..2.0)).collect());
    let rows: Vec<usize> = (0..n).collect();
    let mut losses = Vec::with_capacity(steps + 1);
    for _ in 0..steps {
        let (loss, grad) = model.loss_and_gradient(&x, &y, &rows, &w).unwrap();
        losses.push(loss);
        for (p, g) in model.params.iter_mut().zip(&grad) {
            *p -= lr * g;
        }
    }
    losses.push(model.loss(&x, &y, &rows, &w).unwrap());
    losses
}

#[test]
fn small_step_descent_is_monotone_for_most_seeds() {
    let monotone = (0..40u64)
        .filter(|&seed| descent_losses(seed, 10, 1e-2).windows(2).all(|w| w[1] <= w[0]))
        .count();
    assert!(monotone >= 38, "only {monotone}/40 seeds had non-increasing loss");
}

#[test]
fn descent_actually_moves() {
    let l = descent_losses(0, 10, 1e-2);
    assert!(l[10] < l[0]);
}
