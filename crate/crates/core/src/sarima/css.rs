//! Conditional sum of squares for the multiplicative seasonal ARMA recursion.

use super::order::SarimaOrder;
use super::poly;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Coefficients split by role. Packed order is `[phi.., theta.., Phi.., Theta..]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaCoefficients<T> {
    pub ar: Vec<T>,
    pub ma: Vec<T>,
    pub sar: Vec<T>,
    pub sma: Vec<T>,
}

impl<T: Scalar> ArmaCoefficients<T> {
    pub fn unpack(order: &SarimaOrder, packed: &[T]) -> Result<Self> {
        if packed.len() != order.n_coefficients() {
            return Err(Error::Shape(format!(
                "{order} takes {} coefficients, got {}",
                order.n_coefficients(),
                packed.len()
            )));
        }
        let (ar, rest) = packed.split_at(order.p);
        let (ma, rest) = rest.split_at(order.q);
        let (sar, sma) = rest.split_at(order.seasonal_p);
        Ok(Self { ar: ar.to_vec(), ma: ma.to_vec(), sar: sar.to_vec(), sma: sma.to_vec() })
    }

    pub fn pack(&self) -> Vec<T> {
        [&self.ar[..], &self.ma, &self.sar, &self.sma].concat()
    }

    /// Stationary AR factors and invertible MA factors, with the root margin.
    pub fn is_admissible(&self) -> bool {
        poly::ar_is_stationary(&self.ar, poly::ROOT_MARGIN)
            && poly::ar_is_stationary(&self.sar, poly::ROOT_MARGIN)
            && poly::ma_is_invertible(&self.ma, poly::ROOT_MARGIN)
            && poly::ma_is_invertible(&self.sma, poly::ROOT_MARGIN)
    }

    /// `phi(B) Phi(B^m)`.
    pub fn ar_polynomial(&self, m: usize) -> Vec<T> {
        poly::multiply(&poly::ar_polynomial(&self.ar, 1), &poly::ar_polynomial(&self.sar, m))
    }

    /// `theta(B) Theta(B^m)`.
    pub fn ma_polynomial(&self, m: usize) -> Vec<T> {
        poly::multiply(&poly::ma_polynomial(&self.ma, 1), &poly::ma_polynomial(&self.sma, m))
    }
}

/// Lag terms of the expanded recursion
/// `e_t = x_t - sum a_k x_{t-k} - sum b_k e_{t-k}`.
#[derive(Debug, Clone)]
pub(crate) struct Recursion<T> {
    pub ar: Vec<(usize, T)>,
    pub ma: Vec<(usize, T)>,
}

impl<T: Scalar> Recursion<T> {
    pub fn new(coeffs: &ArmaCoefficients<T>, m: usize) -> Self {
        Self {
            ar: poly::sparse_terms(&coeffs.ar_polynomial(m), -T::one()),
            ma: poly::sparse_terms(&coeffs.ma_polynomial(m), T::one()),
        }
    }

    /// Residuals of `x` with zero pre-sample values; returns the sum of squares.
    pub fn residuals_into(&self, x: &[T], out: &mut Vec<T>) -> T {
        out.clear();
        out.reserve(x.len());
        let mut sse = T::zero();
        for t in 0..x.len() {
            let mut e = x[t];
            for &(lag, a) in &self.ar {
                if lag > t {
                    break;
                }
                e -= a * x[t - lag];
            }
            for &(lag, b) in &self.ma {
                if lag > t {
                    break;
                }
                e -= b * out[t - lag];
            }
            sse += e * e;
            out.push(e);
        }
        sse
    }

    /// Forecasts `h` steps past the end of `x` given its residuals (future shocks zero).
    pub fn extrapolate(&self, x: &[T], residuals: &[T], h: usize) -> Vec<T> {
        let n = x.len();
        let mut path = x.to_vec();
        for s in 0..h {
            let t = n + s;
            let mut v = T::zero();
            for &(lag, a) in &self.ar {
                if lag <= t {
                    v += a * path[t - lag];
                }
            }
            for &(lag, b) in &self.ma {
                if lag <= t && t - lag < n {
                    v += b * residuals[t - lag];
                }
            }
            path.push(v);
        }
        path.split_off(n)
    }
}

/// Conditional sum of squares of `diffed - mean` under `order` and packed `coeffs`.
///
/// Inadmissible coefficients (non-stationary AR or non-invertible MA) return a
/// large finite penalty in place of the sum of squares; residuals are still
/// those of the plain recursion.
pub fn css_objective<T: Scalar>(
    order: &SarimaOrder,
    coeffs: &[T],
    diffed: &[T],
    mean: T,
) -> Result<(T, Vec<T>)> {
    let coefficients = ArmaCoefficients::unpack(order, coeffs)?;
    let centered: Vec<T> = diffed.iter().map(|&v| v - mean).collect();
    let mut residuals = Vec::new();
    let sse = Recursion::new(&coefficients, order.m).residuals_into(&centered, &mut residuals);
    if coefficients.is_admissible() && sse.is_finite() {
        Ok((sse, residuals))
    } else {
        Ok((penalty(&centered, coeffs), residuals))
    }
}

fn penalty<T: Scalar>(centered: &[T], coeffs: &[T]) -> T {
    let base: T = centered.iter().map(|&v| v * v).sum::<T>() + T::one();
    let norm: T = coeffs.iter().map(|&c| c * c).sum();
    let p = base * T::lit(1e10) * (T::one() + norm);
    if p.is_finite() {
        p
    } else {
        T::max_value() / T::lit(4.0)
    }
}

/// Reusable objective for the optimizer.
pub(crate) struct CssProblem<'a, T> {
    order: SarimaOrder,
    centered: &'a [T],
    buffer: Vec<T>,
}

impl<'a, T: Scalar> CssProblem<'a, T> {
    pub fn new(order: SarimaOrder, centered: &'a [T]) -> Self {
        Self { order, centered, buffer: Vec::with_capacity(centered.len()) }
    }

    pub fn eval(&mut self, coeffs: &[T]) -> T {
        let c = ArmaCoefficients::unpack(&self.order, coeffs).expect("optimizer keeps dimension");
        if !c.is_admissible() {
            return penalty(self.centered, coeffs);
        }
        let sse = Recursion::new(&c, self.order.m).residuals_into(self.centered, &mut self.buffer);
        if sse.is_finite() {
            sse
        } else {
            penalty(self.centered, coeffs)
        }
    }
}
