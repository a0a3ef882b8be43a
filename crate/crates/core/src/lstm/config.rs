use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperparameters of the single-layer LSTM regressor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LstmConfig {
    pub units: usize,
    pub dropout: f64,
    pub lookback: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// Global gradient-norm clip applied before every optimizer step.
    pub clip_norm: f64,
    /// RMSProp decay.
    pub rho: f64,
    /// RMSProp denominator offset.
    pub epsilon: f64,
}

impl Default for LstmConfig {
    fn default() -> Self {
        Self {
            units: 50,
            dropout: 0.2,
            lookback: 50,
            epochs: 100,
            learning_rate: 1e-3,
            batch_size: 32,
            seed: 0,
            clip_norm: 5.0,
            rho: 0.9,
            epsilon: 1e-7,
        }
    }
}

impl LstmConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        if self.units == 0 {
            return fail("units must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return fail(format!("dropout must be in [0, 1), got {}", self.dropout));
        }
        if self.lookback == 0 {
            return fail("lookback must be at least 1".into());
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        if self.batch_size == 0 {
            return fail("batch size must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if !(self.clip_norm > 0.0) {
            return fail(format!("clip norm must be positive, got {}", self.clip_norm));
        }
        if !(0.0..1.0).contains(&self.rho) || !(self.epsilon > 0.0) {
            return fail("rho must be in [0, 1) and epsilon positive".into());
        }
        Ok(())
    }
}
