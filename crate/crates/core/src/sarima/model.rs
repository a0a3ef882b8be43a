use serde::{Deserialize, Serialize};

use super::css::{ArmaCoefficients, CssProblem, Recursion};
use super::order::{SarimaOrder, DEFAULT_COMPLEXITY_CAP};
use super::simplex::{self, SimplexOptions};
use crate::error::{Error, Result};
use crate::preprocess::{difference, integrate};
use crate::scalar::{mean, Scalar};

/// Fitted SARIMA model.
///
/// Keeps the leading `d + D*m` levels and the differenced sample so the
/// training history can be rebuilt exactly for forecasting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SarimaModel<T> {
    pub order: SarimaOrder,
    pub ar: Vec<T>,
    pub ma: Vec<T>,
    pub sar: Vec<T>,
    pub sma: Vec<T>,
    /// Mean of the differenced series; zero when differencing is applied.
    pub mean: T,
    pub sigma2: T,
    pub loglik: T,
    pub n_obs: usize,
    pub k: usize,
    pub iterations: usize,
    pub head: Vec<T>,
    pub diffed: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AicConvention {
    /// `-(2/N) LL + 2k/N`
    Normalized,
    /// `-2 LL + 2k`
    #[default]
    Standard,
}

pub fn aic<T: Scalar>(loglik: T, n: usize, k: usize, convention: AicConvention) -> T {
    let two = T::lit(2.0);
    let k = T::from_usize_lossy(k);
    match convention {
        AicConvention::Standard => -two * loglik + two * k,
        AicConvention::Normalized => {
            let n = T::from_usize_lossy(n);
            -(two / n) * loglik + two * k / n
        }
    }
}

pub fn bic<T: Scalar>(loglik: T, n: usize, k: usize) -> T {
    -T::lit(2.0) * loglik + T::from_usize_lossy(n).ln() * T::from_usize_lossy(k)
}

/// Gaussian log-likelihood at the variance MLE `sigma2 = sse / n`.
pub fn gaussian_loglik<T: Scalar>(sigma2: T, n: usize) -> T {
    let n = T::from_usize_lossy(n);
    -n / T::lit(2.0) * ((T::lit(2.0) * T::lit(std::f64::consts::PI) * sigma2).ln() + T::one())
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Simplex iterations per parameter (`k = p+q+P+Q+1`).
    pub iterations_per_param: usize,
    pub rel_tol: f64,
    pub complexity_cap: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { iterations_per_param: 500, rel_tol: 1e-8, complexity_cap: DEFAULT_COMPLEXITY_CAP }
    }
}

/// Deterministic starting point: 0.1 with alternating sign.
pub fn start_coefficients<T: Scalar>(n: usize) -> Vec<T> {
    (0..n).map(|i| if i % 2 == 0 { T::lit(0.1) } else { T::lit(-0.1) }).collect()
}

/// Minimum series length accepted by [`fit`] for `order`.
pub fn min_fit_length(order: &SarimaOrder) -> usize {
    let spec = order.differencing();
    let ar_ma = order
        .p
        .max(order.q)
        .max(order.seasonal_p * order.m)
        .max(order.seasonal_q * order.m);
    spec.lost() + ar_ma + 11
}

pub fn fit<T: Scalar>(values: &[T], order: SarimaOrder) -> Result<SarimaModel<T>> {
    fit_with(values, order, &FitOptions::default())
}

/// Minimizes the conditional sum of squares with a Nelder–Mead simplex.
pub fn fit_with<T: Scalar>(values: &[T], order: SarimaOrder, opts: &FitOptions) -> Result<SarimaModel<T>> {
    order.validate(opts.complexity_cap)?;
    let needed = min_fit_length(&order);
    if values.len() < needed {
        return Err(Error::TooShort { needed, got: values.len() });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    let spec = order.differencing();
    let diffed = difference(values, &spec)?;
    let mu = if order.includes_mean() { mean(&diffed) } else { T::zero() };
    let centered: Vec<T> = diffed.iter().map(|&v| v - mu).collect();

    let n_coef = order.n_coefficients();
    let simplex_opts = SimplexOptions {
        max_iterations: opts.iterations_per_param * order.n_params(),
        rel_tol: opts.rel_tol,
        ..SimplexOptions::default()
    };
    let mut problem = CssProblem::new(order, &centered);
    let result = simplex::minimize(|c| problem.eval(c), &start_coefficients(n_coef), &simplex_opts);

    let coeffs = ArmaCoefficients::unpack(&order, &result.x)?;
    if !result.converged || !coeffs.is_admissible() {
        return Err(Error::Convergence {
            iterations: result.iterations,
            best_objective: result.value.as_f64(),
            best_coefficients: result.x.iter().map(|c| c.as_f64()).collect(),
        });
    }

    let n = diffed.len();
    let sigma2 = result.value / T::from_usize_lossy(n);
    if !(sigma2 > T::zero()) {
        return Err(Error::InvalidArgument(format!("{order}: zero residual variance")));
    }
    Ok(SarimaModel {
        order,
        ar: coeffs.ar,
        ma: coeffs.ma,
        sar: coeffs.sar,
        sma: coeffs.sma,
        mean: mu,
        sigma2,
        loglik: gaussian_loglik(sigma2, n),
        n_obs: n,
        k: order.n_params(),
        iterations: result.iterations,
        head: values[..spec.lost()].to_vec(),
        diffed,
    })
}

impl<T: Scalar> SarimaModel<T> {
    pub fn coefficients(&self) -> ArmaCoefficients<T> {
        ArmaCoefficients {
            ar: self.ar.clone(),
            ma: self.ma.clone(),
            sar: self.sar.clone(),
            sma: self.sma.clone(),
        }
    }

    pub fn aic(&self, convention: AicConvention) -> T {
        aic(self.loglik, self.n_obs, self.k, convention)
    }

    pub fn bic(&self) -> T {
        bic(self.loglik, self.n_obs, self.k)
    }

    pub(crate) fn recursion(&self) -> Recursion<T> {
        Recursion::new(&self.coefficients(), self.order.m)
    }

    pub(crate) fn centered(&self) -> Vec<T> {
        self.diffed.iter().map(|&v| v - self.mean).collect()
    }

    /// In-sample one-step residuals on the differenced scale.
    pub fn residuals(&self) -> Vec<T> {
        let mut out = Vec::new();
        self.recursion().residuals_into(&self.centered(), &mut out);
        out
    }

    /// The training series in levels.
    pub fn history(&self) -> Vec<T> {
        integrate(&self.diffed, &self.order.differencing(), &self.head)
            .expect("head length fixed at fit time")
    }

    /// Same coefficients, conditioned on `more` observations appended to the history.
    pub fn extend(&self, more: &[T]) -> Result<Self> {
        let mut levels = self.history();
        levels.extend_from_slice(more);
        let diffed = difference(&levels, &self.order.differencing())?;
        Ok(Self { diffed, ..self.clone() })
    }

    /// One-step-ahead prediction errors for `future`, each prediction using
    /// the true values before it.
    pub fn one_step_errors(&self, future: &[T]) -> Result<Vec<T>> {
        let extended = self.extend(future)?;
        let residuals = extended.residuals();
        Ok(residuals[residuals.len() - future.len()..].to_vec())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
