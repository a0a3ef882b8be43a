use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::backward::{backward, clip_global_norm};
use super::cell::{forward_sequence, predict_window};
use super::config::LstmConfig;
use super::mse;
use super::rmsprop::{rmsprop_step, RmsPropState};
use super::weights::{init_weights, LstmWeights};
use crate::data::DataSplit;
use crate::error::{Error, Result};
use crate::preprocess::{make_windows, MinMaxScaler, WindowSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EpochRecord<T> {
    pub epoch: usize,
    /// Inference-mode MSE over all training windows, scaled units.
    pub train_mse: T,
    /// Same over the validation targets; `None` without a validation block.
    pub val_mse: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrainedLstm<T> {
    pub config: LstmConfig,
    pub weights: LstmWeights<T>,
    pub scaler: MinMaxScaler<T>,
    pub history: Vec<EpochRecord<T>>,
    pub runtime_seconds: f64,
}

/// Windows predicting every value of `target` from the `z` true values before it,
/// the first ones drawn from the tail of `context`.
pub(crate) fn windows_after<T: Scalar>(context: &[T], target: &[T], z: usize) -> Result<Option<WindowSet<T>>> {
    if target.is_empty() {
        return Ok(None);
    }
    if context.len() < z {
        return Err(Error::TooShort { needed: z, got: context.len() });
    }
    let mut joined = context[context.len() - z..].to_vec();
    joined.extend_from_slice(target);
    make_windows(&joined, z).map(Some)
}

fn sample_mask<T: Scalar>(rng: &mut ChaCha8Rng, hidden: usize, rate: f64) -> Vec<T> {
    let keep = T::lit(1.0 / (1.0 - rate));
    (0..hidden).map(|_| if rng.random::<f64>() < rate { T::zero() } else { keep }).collect()
}

fn window_mse<T: Scalar>(weights: &LstmWeights<T>, windows: &WindowSet<T>) -> T {
    let preds: Vec<T> = windows.inputs.iter().map(|w| predict_window(weights, w)).collect();
    mse(&preds, &windows.targets).expect("one prediction per target")
}

/// Mini-batch RMSProp on min-max scaled lookback windows of `data.train`.
///
/// The scaler is fit on the training block only. Each epoch shuffles the
/// windows, draws fresh dropout masks per batch, clips the gradient to
/// `config.clip_norm`, and records inference-mode train/validation MSE.
pub fn train<T: Scalar>(data: &DataSplit<T>, config: &LstmConfig) -> Result<TrainedLstm<T>> {
    config.validate()?;
    let z = config.lookback;
    let train_values = data.train.values();
    if train_values.len() <= z {
        return Err(Error::TooShort { needed: z + 1, got: train_values.len() });
    }
    let scaler = MinMaxScaler::fit(train_values)?;
    let scaled_train = scaler.transform(train_values);
    let train_windows = make_windows(&scaled_train, z)?;
    let val_windows = windows_after(&scaled_train, &scaler.transform(data.validation.values()), z)?;

    let mut weights: LstmWeights<T> = init_weights(config);
    let mut opt = RmsPropState::new(&weights, config.rho, config.epsilon);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let lr = T::lit(config.learning_rate);
    let clip = T::lit(config.clip_norm);

    let mut order: Vec<usize> = (0..train_windows.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let started = Instant::now();
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let mut passes = Vec::with_capacity(batch.len());
            let mut targets = Vec::with_capacity(batch.len());
            for &idx in batch {
                let mask = (config.dropout > 0.0).then(|| sample_mask(&mut rng, config.units, config.dropout));
                passes.push(forward_sequence(&weights, &train_windows.inputs[idx], mask.as_deref())?);
                targets.push(train_windows.targets[idx]);
            }
            let (mut grads, loss) = backward(&weights, &passes, &targets)?;
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            clip_global_norm(&mut grads, clip);
            rmsprop_step(&mut weights, &grads, &mut opt, lr);
        }
        let train_mse = window_mse(&weights, &train_windows);
        let val_mse = val_windows.as_ref().map(|w| window_mse(&weights, w));
        if !train_mse.is_finite() || val_mse.is_some_and(|v| !v.is_finite()) {
            return Err(Error::Divergence { epoch });
        }
        history.push(EpochRecord { epoch, train_mse, val_mse });
    }
    let runtime_seconds = started.elapsed().as_secs_f64();

    Ok(TrainedLstm { config: *config, weights, scaler, history, runtime_seconds })
}

impl<T: Scalar> TrainedLstm<T> {
    pub fn lookback(&self) -> usize {
        self.config.lookback
    }

    /// Rolling one-step predictions in scaled units; element `k` predicts `values[k + z]`.
    pub fn predict_rolling_scaled(&self, values: &[T]) -> Result<Vec<T>> {
        let scaled = self.scaler.transform(values);
        let windows = make_windows(&scaled, self.lookback())?;
        Ok(windows.inputs.iter().map(|w| predict_window(&self.weights, w)).collect())
    }

    /// Period-to-point predictions in price units, aligned to `values[z..]`.
    pub fn predict_rolling(&self, values: &[T]) -> Result<Vec<T>> {
        Ok(self.scaler.inverse(&self.predict_rolling_scaled(values)?))
    }

    /// Closed-loop forecast: each prediction is appended to the window for the next step.
    ///
    /// Uses the last `z` entries of `last_window` (price units).
    pub fn predict_future(&self, last_window: &[T], horizon: usize) -> Result<Vec<T>> {
        let z = self.lookback();
        if horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        if last_window.len() < z {
            return Err(Error::TooShort { needed: z, got: last_window.len() });
        }
        let mut window = self.scaler.transform(&last_window[last_window.len() - z..]);
        let mut out = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let next = predict_window(&self.weights, &window);
            out.push(self.scaler.unscale(next));
            window.remove(0);
            window.push(next);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(s)?;
        model.config.validate()?;
        model.weights.validate()?;
        if model.weights.hidden != model.config.units {
            return Err(Error::Shape(format!(
                "weights have {} units, config says {}",
                model.weights.hidden, model.config.units
            )));
        }
        if !(model.scaler.x_range > T::zero()) {
            return Err(Error::ZeroRange);
        }
        Ok(model)
    }
}
