use crate::dataset::ClassWeights;

use super::NnError;

/// Probability floor inside the logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

/// Weighted categorical cross-entropy for a single row, given the true
/// class index. Writes `d loss / d logits = w_y (p - y)` into `grad`.
#[inline]
pub fn weighted_ce_class(p: &[f64], class: usize, weight: f64, grad: &mut [f64]) -> f64 {
    for (g, &pk) in grad.iter_mut().zip(p) {
        *g = weight * pk;
    }
    grad[class] -= weight;
    -weight * p[class].max(PROB_FLOOR).ln()
}

/// Weighted categorical cross-entropy against a one-hot target. Returns
/// the loss and its gradient with respect to the logits.
pub fn weighted_ce_loss(p: &[f64], y: &[f64], w: &ClassWeights) -> Result<(f64, Vec<f64>), NnError> {
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    let zeros = y.iter().filter(|&&v| v == 0.0).count();
    if ones != 1 || ones + zeros != y.len() || y.len() != p.len() {
        return Err(NnError::NotOneHot);
    }
    let class = y.iter().position(|&v| v == 1.0).expect("one hot");
    let mut grad = vec![0.0; p.len()];
    let loss = weighted_ce_class(p, class, w.get(class), &mut grad);
    Ok((loss, grad))
}
