use serde::{Deserialize, Serialize};

use super::DatasetError;

/// Per-class loss weights, indexed by class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassWeights(pub Vec<f64>);

impl ClassWeights {
    pub fn uniform(n_classes: usize) -> Self {
        Self(vec![1.0; n_classes])
    }

    /// Balanced inverse-frequency weights `N / (K * N_c)`.
    pub fn balanced(counts: &[usize]) -> Result<Self, DatasetError> {
        if let Some(class) = counts.iter().position(|&c| c == 0) {
            return Err(DatasetError::ZeroClassCount { class });
        }
        let total: usize = counts.iter().sum();
        let k = counts.len() as f64;
        Ok(Self(
            counts.iter().map(|&c| total as f64 / (k * c as f64)).collect(),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, class: usize) -> f64 {
        self.0[class]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Shorthand for [`ClassWeights::balanced`].
pub fn compute_class_weights(counts: &[usize]) -> Result<ClassWeights, DatasetError> {
    ClassWeights::balanced(counts)
}
