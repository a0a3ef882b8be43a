//! Reversible transforms: min-max rescaling, regular/seasonal differencing
//! and lookback windowing.

use serde::{Deserialize, Serialize};

use crate::data::UnivariateSeries;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `x_new = (x - x_min) / x_range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MinMaxScaler<T> {
    pub x_min: T,
    pub x_range: T,
}

impl<T: Scalar> MinMaxScaler<T> {
    pub fn fit(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        let (lo, hi) = values
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let range = hi - lo;
        if !(range > T::zero()) || !range.is_finite() {
            return Err(Error::ZeroRange);
        }
        Ok(Self { x_min: lo, x_range: range })
    }

    #[inline]
    pub fn scale(&self, x: T) -> T {
        (x - self.x_min) / self.x_range
    }

    #[inline]
    pub fn unscale(&self, y: T) -> T {
        y * self.x_range + self.x_min
    }

    pub fn transform(&self, values: &[T]) -> Vec<T> {
        values.iter().map(|&x| self.scale(x)).collect()
    }

    pub fn inverse(&self, scaled: &[T]) -> Vec<T> {
        scaled.iter().map(|&y| self.unscale(y)).collect()
    }
}

/// Fits a scaler on `series` and returns the rescaled series with it.
pub fn fit_rescale<T: Scalar>(
    series: &UnivariateSeries<T>,
) -> Result<(UnivariateSeries<T>, MinMaxScaler<T>)> {
    let scaler = MinMaxScaler::fit(series.values())?;
    let scaled = UnivariateSeries::new(series.dates().to_vec(), scaler.transform(series.values()))?;
    Ok((scaled, scaler))
}

pub fn inverse_rescale<T: Scalar>(scaled: &[T], scaler: &MinMaxScaler<T>) -> Vec<T> {
    scaler.inverse(scaled)
}

/// `(1 - B)^d (1 - B^m)^D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DifferenceSpec {
    pub d: usize,
    pub seasonal_d: usize,
    pub m: usize,
}

impl DifferenceSpec {
    pub fn new(d: usize, seasonal_d: usize, m: usize) -> Self {
        Self { d, seasonal_d, m: m.max(1) }
    }

    /// Observations consumed by differencing, `d + D*m`.
    pub fn lost(&self) -> usize {
        self.d + self.seasonal_d * self.m
    }

    /// Lags of the individual operators in application order: seasonal first.
    fn lags(&self) -> impl Iterator<Item = usize> + Clone {
        std::iter::repeat_n(self.m, self.seasonal_d).chain(std::iter::repeat_n(1, self.d))
    }

    /// Coefficients of the expanded differencing polynomial, index = lag.
    pub fn polynomial<T: Scalar>(&self) -> Vec<T> {
        let mut poly = vec![T::one()];
        for lag in self.lags() {
            let mut next = vec![T::zero(); poly.len() + lag];
            for (i, &c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + lag] -= c;
            }
            poly = next;
        }
        poly
    }
}

fn lag_difference<T: Scalar>(values: &[T], lag: usize) -> Vec<T> {
    values.iter().skip(lag).zip(values).map(|(&a, &b)| a - b).collect()
}

/// Applies seasonal differencing `D` times at lag `m`, then regular differencing `d` times.
pub fn difference<T: Scalar>(values: &[T], spec: &DifferenceSpec) -> Result<Vec<T>> {
    if values.len() <= spec.lost() {
        return Err(Error::TooShort { needed: spec.lost() + 1, got: values.len() });
    }
    Ok(spec.lags().fold(values.to_vec(), |cur, lag| lag_difference(&cur, lag)))
}

/// Inverse of [`difference`], given the first `d + D*m` original values.
pub fn integrate<T: Scalar>(diffed: &[T], spec: &DifferenceSpec, head: &[T]) -> Result<Vec<T>> {
    if head.len() != spec.lost() {
        return Err(Error::HeadLength { expected: spec.lost(), got: head.len() });
    }
    // prefixes of every intermediate stage, obtained by differencing the head itself
    let lags: Vec<usize> = spec.lags().collect();
    let mut heads = vec![head.to_vec()];
    for &lag in &lags {
        let next = lag_difference(heads.last().unwrap(), lag);
        heads.push(next);
    }

    let mut cur = diffed.to_vec();
    for (stage, &lag) in lags.iter().enumerate().rev() {
        let mut level = Vec::with_capacity(cur.len() + lag);
        level.extend_from_slice(&heads[stage][..lag]);
        for (t, &dx) in cur.iter().enumerate() {
            let prev = level[t];
            level.push(dx + prev);
        }
        cur = level;
    }
    Ok(cur)
}

/// Supervised pairs: `inputs[k] = source[k..k+z]`, `targets[k] = source[k+z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet<T> {
    pub inputs: Vec<Vec<T>>,
    pub targets: Vec<T>,
    pub lookback: usize,
}

impl<T> WindowSet<T> {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

pub fn make_windows<T: Scalar>(values: &[T], lookback: usize) -> Result<WindowSet<T>> {
    if lookback == 0 {
        return Err(Error::InvalidArgument("lookback must be at least 1".into()));
    }
    if values.len() <= lookback {
        return Err(Error::TooShort { needed: lookback + 1, got: values.len() });
    }
    let inputs = values.windows(lookback + 1).map(|w| w[..lookback].to_vec()).collect();
    let targets = values[lookback..].to_vec();
    Ok(WindowSet { inputs, targets, lookback })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rescale_examples() {
        let s = MinMaxScaler::fit(&[0.0, 5.0, 10.0]).unwrap();
        assert_eq!(s.transform(&[0.0, 5.0, 10.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!((s.x_min, s.x_range), (0.0, 10.0));
        assert_eq!(MinMaxScaler::fit(&[2.0, 4.0]).unwrap().transform(&[2.0, 4.0]), vec![0.0, 1.0]);
        assert!(matches!(MinMaxScaler::fit(&[3.0, 3.0, 3.0]), Err(Error::ZeroRange)));
        assert_eq!(s.unscale(0.5), 5.0);
        let s7 = MinMaxScaler { x_min: 7.0, x_range: 3.0 };
        assert_eq!(inverse_rescale(&[0.0], &s7), vec![7.0]);
    }

    #[test]
    fn difference_examples() {
        assert_eq!(difference(&[1.0, 2.0, 4.0], &DifferenceSpec::new(1, 0, 1)).unwrap(), vec![1.0, 2.0]);
        assert_eq!(
            difference(&[1.0, 2.0, 3.0, 4.0], &DifferenceSpec::new(0, 1, 2)).unwrap(),
            vec![2.0, 2.0]
        );
        // seasonal: [2,2,2,2]; regular: [0,0,0]
        assert_eq!(
            difference(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &DifferenceSpec::new(1, 1, 2)).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
        assert!(matches!(
            difference(&[1.0, 2.0], &DifferenceSpec::new(1, 1, 2)),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn integrate_examples() {
        let spec = DifferenceSpec::new(1, 0, 1);
        assert_eq!(integrate(&[1.0, 2.0], &spec, &[1.0]).unwrap(), vec![1.0, 2.0, 4.0]);
        assert!(integrate::<f64>(&[], &DifferenceSpec::new(0, 0, 1), &[]).unwrap().is_empty());
        assert_eq!(integrate(&[], &DifferenceSpec::new(0, 1, 2), &[5.0, 6.0]).unwrap(), vec![5.0, 6.0]);
        assert!(matches!(
            integrate(&[1.0], &spec, &[1.0, 2.0]),
            Err(Error::HeadLength { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn polynomial_matches_operator() {
        // (1-B)(1-B^2) = 1 - B - B^2 + B^3
        assert_eq!(DifferenceSpec::new(1, 1, 2).polynomial::<f64>(), vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(DifferenceSpec::new(2, 0, 1).polynomial::<f64>(), vec![1.0, -2.0, 1.0]);
    }

    #[test]
    fn windows_examples() {
        let w = make_windows(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(w.inputs, vec![vec![1.0, 2.0], vec![2.0, 3.0]]);
        assert_eq!(w.targets, vec![3.0, 4.0]);
        let ramp: Vec<f64> = (0..51).map(f64::from).collect();
        assert_eq!(make_windows(&ramp, 50).unwrap().len(), 1);
        assert!(matches!(make_windows(&ramp[..50], 50), Err(Error::TooShort { .. })));
    }

    #[test]
    fn works_in_single_precision() {
        let s = MinMaxScaler::<f32>::fit(&[1.0, 3.0]).unwrap();
        assert_eq!(s.scale(2.0), 0.5f32);
        let spec = DifferenceSpec::new(1, 1, 4);
        let x: Vec<f32> = (0..20).map(|i| (i * i) as f32).collect();
        let back = integrate(&difference(&x, &spec).unwrap(), &spec, &x[..spec.lost()]).unwrap();
        assert_eq!(back, x);
    }

    proptest! {
        #[test]
        fn rescale_hits_unit_interval(xs in proptest::collection::vec(-1e6f64..1e6, 2..60)) {
            prop_assume!(xs.iter().any(|&x| x != xs[0]));
            let s = MinMaxScaler::fit(&xs).unwrap();
            let y = s.transform(&xs);
            prop_assert_eq!(y.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
            prop_assert_eq!(y.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 1.0);
            let back = s.inverse(&y);
            let scale = xs.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
            for (a, b) in back.iter().zip(&xs) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn windows_of_increasing_series_have_increasing_targets(n in 3usize..80, z in 1usize..10) {
            prop_assume!(n > z);
            let xs: Vec<f64> = (0..n).map(|i| i as f64 * 1.5).collect();
            let w = make_windows(&xs, z).unwrap();
            prop_assert_eq!(w.len(), n - z);
            prop_assert!(w.targets.windows(2).all(|p| p[0] < p[1]));
        }
    }
}
