use serde::{Deserialize, Serialize};

use super::NnError;

pub const CONV_FILTERS_RANGE: (usize, usize) = (4, 128);
pub const LSTM_UNITS_RANGE: (usize, usize) = (8, 256);
pub const LEARNING_RATE_RANGE: (f64, f64) = (1e-4, 1e-1);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub conv_filters: usize,
    pub conv_kernel: usize,
    pub lstm_units: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            conv_filters: 16,
            conv_kernel: 3,
            lstm_units: 24,
            learning_rate: 3e-3,
            batch_size: 256,
            max_epochs: 30,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |msg: String| Err(NnError::InvalidHyperParams(msg));
        let (fl, fh) = CONV_FILTERS_RANGE;
        if !(fl..=fh).contains(&self.conv_filters) {
            return bad(format!("conv_filters {} outside [{fl}, {fh}]", self.conv_filters));
        }
        let (ul, uh) = LSTM_UNITS_RANGE;
        if !(ul..=uh).contains(&self.lstm_units) {
            return bad(format!("lstm_units {} outside [{ul}, {uh}]", self.lstm_units));
        }
        let (ll, lh) = LEARNING_RATE_RANGE;
        if !(self.learning_rate >= ll && self.learning_rate <= lh) {
            return bad(format!("learning_rate {} outside [{ll}, {lh}]", self.learning_rate));
        }
        if self.conv_kernel == 0 || self.conv_kernel.is_multiple_of(2) {
            return bad(format!("conv_kernel {} must be a positive odd integer", self.conv_kernel));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return bad("batch_size and max_epochs must be positive".into());
        }
        Ok(())
    }
}
