use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::layers::argmax;
use super::{ConvLstmModel, HyperParams, NnError};
use crate::dataset::{ClassWeights, FeatureMatrix};

/// Epochs without validation improvement before stopping.
pub const EARLY_STOP_PATIENCE: usize = 5;
/// Epochs without improvement before the learning rate is halved.
pub const LR_PATIENCE: usize = 3;
/// The learning rate never drops below `initial / LR_FLOOR_DIVISOR`.
pub const LR_FLOOR_DIVISOR: f64 = 64.0;

/// Batch gradients are rescaled to at most this global L2 norm. Rare
/// classes carry weights in the hundreds, and a batch that happens to hold
/// one of their rows would otherwise swamp Adam's moment estimates.
pub const GRAD_CLIP_NORM: f64 = 5.0;

/// Scales `grad` down so its L2 norm is at most `max_norm`.
pub fn clip_grad_norm(grad: &mut [f64], max_norm: f64) {
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm > max_norm {
        let k = max_norm / norm;
        grad.iter_mut().for_each(|g| *g *= k);
    }
}

/// Features with aligned class labels.
#[derive(Debug, Clone, Copy)]
pub struct LabeledSet<'a> {
    pub features: &'a FeatureMatrix,
    pub labels: &'a [usize],
}

impl<'a> LabeledSet<'a> {
    pub fn new(features: &'a FeatureMatrix, labels: &'a [usize]) -> Self {
        assert_eq!(features.n_rows, labels.len(), "features and labels must align");
        Self { features, labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainState {
    pub adam: AdamState,
    pub epoch: usize,
    pub best_val_loss: f64,
    pub epochs_since_improvement: usize,
    pub plateau_epochs: usize,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EarlyStop,
    MaxEpochs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_acc: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub stop_reason: StopReason,
    /// Epoch whose parameters were restored (1-based).
    pub best_epoch: usize,
}

impl TrainReport {
    pub fn best(&self) -> &EpochRecord {
        &self.epochs[self.best_epoch - 1]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss,val_acc,lr\n");
        for e in &self.epochs {
            let _ = writeln!(out, "{},{},{},{},{}", e.epoch, e.train_loss, e.val_loss, e.val_acc, e.learning_rate);
        }
        out
    }
}

/// Mean `weights`-weighted loss and accuracy over a set.
pub fn evaluate_loss_acc(model: &ConvLstmModel, set: LabeledSet<'_>, weights: &ClassWeights) -> Result<(f64, f64), NnError> {
    let probs = model.predict_proba(set.features)?;
    let mut loss = 0.0;
    let mut correct = 0usize;
    for (p, &y) in probs.iter().zip(set.labels) {
        loss -= weights.get(y) * p[y].max(super::loss::PROB_FLOOR).ln();
        correct += usize::from(argmax(p) == y);
    }
    let n = set.len() as f64;
    Ok((loss / n, correct as f64 / n))
}

/// Mini-batch Adam with seeded shuffling, early stopping on validation
/// loss (best parameters restored) and plateau learning-rate halving.
pub fn train(
    mut model: ConvLstmModel,
    train_set: LabeledSet<'_>,
    val_set: LabeledSet<'_>,
    hp: &HyperParams,
    weights: &ClassWeights,
    seed: u64,
) -> Result<(ConvLstmModel, TrainReport), NnError> {
    if train_set.is_empty() {
        return Err(NnError::EmptySet("training"));
    }
    if val_set.is_empty() {
        return Err(NnError::EmptySet("validation"));
    }
    if hp.batch_size == 0 || hp.max_epochs == 0 {
        return Err(NnError::InvalidHyperParams("batch_size and max_epochs must be positive".into()));
    }
    if weights.len() != model.arch.n_classes() {
        return Err(NnError::InvalidHyperParams(format!(
            "{} class weights for {} classes",
            weights.len(),
            model.arch.n_classes()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = TrainState {
        adam: AdamState::new(model.n_params()),
        epoch: 0,
        best_val_loss: f64::INFINITY,
        epochs_since_improvement: 0,
        plateau_epochs: 0,
        learning_rate: hp.learning_rate,
    };
    let lr_floor = hp.learning_rate / LR_FLOOR_DIVISOR;
    // Class weights shape training only. Early stopping watches plain
    // cross-entropy, since a handful of heavily weighted validation rows
    // would otherwise dominate it.
    let val_weights = ClassWeights::uniform(weights.len());
    let mut best_params = model.params.clone();
    let mut best_epoch = 0;
    let mut records = Vec::with_capacity(hp.max_epochs);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut stop_reason = StopReason::MaxEpochs;

    while state.epoch < hp.max_epochs {
        state.epoch += 1;
        order.shuffle(&mut rng);
        let lr = state.learning_rate;
        let mut loss_sum = 0.0;
        for batch in order.chunks(hp.batch_size) {
            let (loss, mut grad) = model.loss_and_gradient(train_set.features, train_set.labels, batch, weights)?;
            clip_grad_norm(&mut grad, GRAD_CLIP_NORM);
            if !loss.is_finite() {
                return Err(NnError::Diverged { epoch: state.epoch });
            }
            loss_sum += loss * batch.len() as f64;
            adam_step(&mut model.params, &grad, &mut state.adam, lr);
        }
        let train_loss = loss_sum / train_set.len() as f64;
        let (val_loss, val_acc) = evaluate_loss_acc(&model, val_set, &val_weights)?;
        if !val_loss.is_finite() {
            return Err(NnError::Diverged { epoch: state.epoch });
        }
        records.push(EpochRecord {
            epoch: state.epoch,
            train_loss,
            val_loss,
            val_acc,
            learning_rate: lr,
        });

        if val_loss < state.best_val_loss {
            state.best_val_loss = val_loss;
            state.epochs_since_improvement = 0;
            state.plateau_epochs = 0;
            best_params.copy_from_slice(&model.params);
            best_epoch = state.epoch;
        } else {
            state.epochs_since_improvement += 1;
            state.plateau_epochs += 1;
            if state.plateau_epochs >= LR_PATIENCE {
                state.learning_rate = (state.learning_rate * 0.5).max(lr_floor);
                state.plateau_epochs = 0;
            }
            if state.epochs_since_improvement >= EARLY_STOP_PATIENCE {
                stop_reason = StopReason::EarlyStop;
                break;
            }
        }
    }
    model.params = best_params;
    Ok((
        model,
        TrainReport {
            epochs: records,
            stop_reason,
            best_epoch,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Architecture, ConvLstmModel};
    use rand::Rng;

    fn separable(n: usize, seed: u64) -> (FeatureMatrix, Vec<usize>) {
        // Class is which side of the hyperplane mean(x) = 0.5 a row falls on,
        // with a margin of 0.05.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = Vec::new();
        let mut labels = Vec::new();
        while labels.len() < n {
            let x: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..1.0)).collect();
            let s: f64 = x.iter().sum::<f64>() / 6.0 - 0.5;
            if s.abs() < 0.05 {
                continue;
            }
            labels.push(usize::from(s > 0.0));
            data.extend(x);
        }
        (FeatureMatrix::new(6, data, 7), labels)
    }

    fn toy_model(hp: &HyperParams, seed: u64) -> ConvLstmModel {
        let arch = Architecture::from_hyper(hp, 6, vec!["a".into(), "b".into()], 7);
        ConvLstmModel::init(arch, seed).unwrap()
    }

    #[test]
    fn separable_toy_set_is_learned() {
        let (x, y) = separable(200, 1);
        let (vx, vy) = separable(100, 2);
        let hp = HyperParams {
            conv_filters: 8,
            lstm_units: 8,
            learning_rate: 0.02,
            batch_size: 16,
            max_epochs: 30,
            ..Default::default()
        };
        let (model, report) = train(
            toy_model(&hp, 3),
            LabeledSet::new(&x, &y),
            LabeledSet::new(&vx, &vy),
            &hp,
            &ClassWeights::uniform(2),
            5,
        )
        .unwrap();
        assert!(report.epochs.len() <= 30);
        let best = report.epochs.iter().map(|e| e.val_acc).fold(0.0, f64::max);
        assert_eq!(best, 1.0, "{}", report.to_csv());
        let (_, acc) = evaluate_loss_acc(&model, LabeledSet::new(&vx, &vy), &ClassWeights::uniform(2)).unwrap();
        assert!(acc >= 0.98);
    }

    #[test]
    fn patience_exhaustion_stops_early() {
        // Random labels: validation loss stops improving quickly.
        let (x, _) = separable(120, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let y: Vec<usize> = (0..120).map(|_| rng.random_range(0..2)).collect();
        let hp = HyperParams {
            conv_filters: 4,
            lstm_units: 8,
            learning_rate: 0.05,
            batch_size: 8,
            max_epochs: 100,
            ..Default::default()
        };
        let (_, report) = train(
            toy_model(&hp, 1),
            LabeledSet::new(&x, &y),
            LabeledSet::new(&x, &y[..].iter().map(|v| 1 - v).collect::<Vec<_>>()),
            &hp,
            &ClassWeights::uniform(2),
            2,
        )
        .unwrap();
        assert_eq!(report.stop_reason, StopReason::EarlyStop);
        assert!(report.epochs.len() < 100);
        assert_eq!(report.epochs.len(), report.best_epoch + EARLY_STOP_PATIENCE);
        // LR halves after every LR_PATIENCE stale epochs, never below the floor.
        let lrs: Vec<f64> = report.epochs.iter().map(|e| e.learning_rate).collect();
        assert!(lrs.windows(2).all(|w| w[1] <= w[0]));
        assert!(lrs.iter().all(|&lr| lr >= hp.learning_rate / LR_FLOOR_DIVISOR));
    }

    #[test]
    fn same_seed_same_report() {
        let (x, y) = separable(80, 5);
        let (vx, vy) = separable(40, 6);
        let hp = HyperParams {
            conv_filters: 4,
            lstm_units: 8,
            batch_size: 16,
            max_epochs: 4,
            ..Default::default()
        };
        let run = || {
            train(toy_model(&hp, 9), LabeledSet::new(&x, &y), LabeledSet::new(&vx, &vy), &hp, &ClassWeights(vec![1.0, 2.0]), 17)
                .unwrap()
        };
        let (m1, r1) = run();
        let (m2, r2) = run();
        assert_eq!(r1, r2);
        assert_eq!(m1.params, m2.params);
    }

    #[test]
    fn clipping_preserves_direction() {
        let mut g = vec![3.0, 4.0];
        clip_grad_norm(&mut g, 1.0);
        assert!((g[0] - 0.6).abs() < 1e-15 && (g[1] - 0.8).abs() < 1e-15);
        let mut small = vec![0.1, -0.2];
        clip_grad_norm(&mut small, 1.0);
        assert_eq!(small, [0.1, -0.2]);
    }

    #[test]
    fn empty_sets_rejected() {
        let (x, y) = separable(10, 5);
        let empty = FeatureMatrix { n_rows: 0, n_cols: 6, data: vec![], column_hash: 7 };
        let hp = HyperParams { conv_filters: 4, lstm_units: 8, ..Default::default() };
        let err = train(toy_model(&hp, 1), LabeledSet::new(&empty, &[]), LabeledSet::new(&x, &y), &hp, &ClassWeights::uniform(2), 0);
        assert!(matches!(err, Err(NnError::EmptySet("training"))));
        let err = train(toy_model(&hp, 1), LabeledSet::new(&x, &y), LabeledSet::new(&empty, &[]), &hp, &ClassWeights::uniform(2), 0);
        assert!(matches!(err, Err(NnError::EmptySet("validation"))));
    }
}
