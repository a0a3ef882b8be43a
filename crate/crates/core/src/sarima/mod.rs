//! Seasonal ARIMA: conditional-sum-of-squares estimation, information
//! criteria, stepwise order selection and interval forecasts.

mod css;
mod forecast;
mod model;
mod order;
pub mod poly;
mod select;
pub mod simplex;

pub use css::{css_objective, ArmaCoefficients};
pub use forecast::{ForecastResult, Z_95};
pub use model::{
    aic, bic, fit, fit_with, gaussian_loglik, min_fit_length, start_coefficients, AicConvention,
    FitOptions, SarimaModel,
};
pub use order::{SarimaOrder, DEFAULT_COMPLEXITY_CAP};
pub use select::{
    best_by, choose_differencing, stepwise_select, Criterion, Selection, StepwiseOptions, TraceEntry,
};
