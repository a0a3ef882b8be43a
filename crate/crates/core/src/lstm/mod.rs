//! Single-layer LSTM regressor trained with backpropagation through time.
//!
//! Gate blocks are stacked `i, f, o, g` in one weight matrix acting on
//! `[h_{t-1}; x_t]`. Dropout is inverted dropout on the final hidden state,
//! followed by a linear dense readout.

mod backward;
mod cell;
mod config;
mod rmsprop;
mod train;
mod weights;

pub use backward::{backward, clip_global_norm};
pub use cell::{forward_sequence, forward_step, predict_window, GateCache, LstmState, SequencePass};
pub use config::LstmConfig;
pub use rmsprop::{rmsprop_step, RmsPropState};
pub use train::{train, EpochRecord, TrainedLstm};
pub(crate) use train::windows_after;
pub use weights::{init_weights, init_weights_with_input, LstmWeights, GATE_ORDER};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mean squared error `(1/n) sum (pred - actual)^2`.
pub fn mse<T: Scalar>(pred: &[T], actual: &[T]) -> Result<T> {
    if pred.len() != actual.len() || pred.is_empty() {
        return Err(Error::Shape(format!(
            "mse needs equal non-empty lengths, got {} and {}",
            pred.len(),
            actual.len()
        )));
    }
    let sum: T = pred.iter().zip(actual).map(|(&p, &a)| (p - a) * (p - a)).sum();
    Ok(sum / T::from_usize_lossy(pred.len()))
}
