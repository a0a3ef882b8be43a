//! Forecasting toolkit for daily price series.
//!
//! Two model families share one pipeline:
//!
//! * [`sarima`]: seasonal ARIMA fitted by conditional sum of squares, scored by
//!   AIC/BIC, with stepwise order search and 95% interval forecasts;
//! * [`lstm`]: a single-layer LSTM regressor trained by backpropagation through
//!   time with RMSProp, used for rolling one-step and closed-loop forecasts.
//!
//! [`data`] and [`preprocess`] cover ingestion, cleaning, chronological splits,
//! rescaling, differencing and windowing; [`eval`] builds comparison reports.
//!
//! The numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod data;
pub mod eval;
pub mod lstm;
pub mod error;
pub mod preprocess;
pub mod sarima;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Series = data::UnivariateSeries<f64>;
pub type Split = data::DataSplit<f64>;
pub type Scaler = preprocess::MinMaxScaler<f64>;
pub type Sarima = sarima::SarimaModel<f64>;
pub type SarimaForecast = sarima::ForecastResult<f64>;
pub type Lstm = lstm::TrainedLstm<f64>;
