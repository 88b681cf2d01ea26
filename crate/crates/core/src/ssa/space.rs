use serde::{Deserialize, Serialize};

use super::SsaError;
use crate::nn::{HyperParams, CONV_FILTERS_RANGE, LEARNING_RATE_RANGE, LSTM_UNITS_RANGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    Integer,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dimension {
    pub lower: f64,
    pub upper: f64,
    pub scale: Scale,
    pub rounding: Rounding,
}

impl Dimension {
    pub fn validate(&self, name: &str) -> Result<(), SsaError> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(SsaError::InvalidSpace(format!("{name}: need finite lower < upper")));
        }
        if self.scale == Scale::Log && self.lower <= 0.0 {
            return Err(SsaError::InvalidSpace(format!("{name}: log scale needs positive bounds")));
        }
        Ok(())
    }

    /// Map `u ∈ [0,1]` into the box.
    pub fn decode(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let v = match self.scale {
            Scale::Linear => self.lower + u * (self.upper - self.lower),
            Scale::Log => (self.lower.ln() + u * (self.upper.ln() - self.lower.ln())).exp(),
        };
        match self.rounding {
            // round half up
            Rounding::Integer => (v + 0.5).floor().clamp(self.lower.ceil(), self.upper.floor()),
            Rounding::Continuous => v.clamp(self.lower, self.upper),
        }
    }
}

/// The tuned box: conv filters, LSTM units, learning rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub conv_filters: Dimension,
    pub lstm_units: Dimension,
    pub learning_rate: Dimension,
}

impl Default for SearchSpace {
    fn default() -> Self {
        let int = |(lo, hi): (usize, usize)| Dimension {
            lower: lo as f64,
            upper: hi as f64,
            scale: Scale::Linear,
            rounding: Rounding::Integer,
        };
        Self {
            conv_filters: int(CONV_FILTERS_RANGE),
            lstm_units: int(LSTM_UNITS_RANGE),
            learning_rate: Dimension {
                lower: LEARNING_RATE_RANGE.0,
                upper: LEARNING_RATE_RANGE.1,
                scale: Scale::Log,
                rounding: Rounding::Continuous,
            },
        }
    }
}

impl SearchSpace {
    pub const DIM: usize = 3;

    /// Each dimension must be well formed and lie inside the trainer's
    /// accepted hyperparameter ranges.
    pub fn validate(&self) -> Result<(), SsaError> {
        let within = |name: &str, d: &Dimension, lo: f64, hi: f64| {
            d.validate(name)?;
            if d.lower < lo || d.upper > hi {
                return Err(SsaError::InvalidSpace(format!("{name}: [{}, {}] exceeds [{lo}, {hi}]", d.lower, d.upper)));
            }
            Ok(())
        };
        within("conv_filters", &self.conv_filters, CONV_FILTERS_RANGE.0 as f64, CONV_FILTERS_RANGE.1 as f64)?;
        within("lstm_units", &self.lstm_units, LSTM_UNITS_RANGE.0 as f64, LSTM_UNITS_RANGE.1 as f64)?;
        within("learning_rate", &self.learning_rate, LEARNING_RATE_RANGE.0, LEARNING_RATE_RANGE.1)?;
        if self.conv_filters.rounding != Rounding::Integer || self.lstm_units.rounding != Rounding::Integer {
            return Err(SsaError::InvalidSpace("conv_filters and lstm_units must use integer rounding".into()));
        }
        Ok(())
    }

    /// Decode a normalised position; fields outside the box come from `base`.
    pub fn decode(&self, coords: &[f64], base: &HyperParams) -> HyperParams {
        assert_eq!(coords.len(), Self::DIM, "position dimension");
        HyperParams {
            conv_filters: self.conv_filters.decode(coords[0]) as usize,
            lstm_units: self.lstm_units.decode(coords[1]) as usize,
            learning_rate: self.learning_rate.decode(coords[2]),
            ..*base
        }
    }
}
