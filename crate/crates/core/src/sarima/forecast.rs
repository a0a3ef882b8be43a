use serde::{Deserialize, Serialize};

use super::model::SarimaModel;
use super::poly;
use crate::error::{Error, Result};
use crate::preprocess::integrate;
use crate::scalar::Scalar;

/// z-score of the two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ForecastResult<T> {
    pub horizon: usize,
    pub mean: Vec<T>,
    pub lower95: Vec<T>,
    pub upper95: Vec<T>,
}

impl<T: Scalar> ForecastResult<T> {
    pub fn widths(&self) -> Vec<T> {
        self.upper95.iter().zip(&self.lower95).map(|(&u, &l)| u - l).collect()
    }
}

impl<T: Scalar> SarimaModel<T> {
    /// `h`-step forecast from the end of the stored history.
    ///
    /// Point forecasts are extrapolated on the differenced scale and integrated
    /// back to levels. Variances use the psi-weights of the model with its
    /// differencing operator folded into the AR polynomial, so
    /// `Var(h) = sigma2 * sum_{j<h} psi_j^2`.
    pub fn forecast(&self, h: usize) -> Result<ForecastResult<T>> {
        if h == 0 {
            return Err(Error::InvalidArgument("forecast horizon must be at least 1".into()));
        }
        let centered = self.centered();
        let residuals = self.residuals();
        let ahead = self.recursion().extrapolate(&centered, &residuals, h);

        let mut diffed = self.diffed.clone();
        diffed.extend(ahead.iter().map(|&v| v + self.mean));
        let spec = self.order.differencing();
        let levels = integrate(&diffed, &spec, &self.head)?;
        let mean = levels[levels.len() - h..].to_vec();

        let coeffs = self.coefficients();
        let full_ar = poly::multiply(&coeffs.ar_polynomial(self.order.m), &spec.polynomial());
        let psi = poly::psi_weights(&full_ar, &coeffs.ma_polynomial(self.order.m), h);
        let z = T::lit(Z_95);
        let mut acc = T::zero();
        let (mut lower95, mut upper95) = (Vec::with_capacity(h), Vec::with_capacity(h));
        for (i, &p) in psi.iter().enumerate() {
            acc += p * p;
            let half = z * (self.sigma2 * acc).sqrt();
            lower95.push(mean[i] - half);
            upper95.push(mean[i] + half);
        }
        Ok(ForecastResult { horizon: h, mean, lower95, upper95 })
    }
}
