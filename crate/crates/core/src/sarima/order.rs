use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::DifferenceSpec;

/// Default cap on `p + q + P + Q`.
pub const DEFAULT_COMPLEXITY_CAP: usize = 10;

/// `(p, d, q)(P, D, Q){m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SarimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    pub m: usize,
}

impl SarimaOrder {
    pub fn new(
        (p, d, q): (usize, usize, usize),
        (seasonal_p, seasonal_d, seasonal_q): (usize, usize, usize),
        m: usize,
    ) -> Self {
        Self { p, d, q, seasonal_p, seasonal_d, seasonal_q, m }
    }

    pub fn arima(p: usize, d: usize, q: usize) -> Self {
        Self::new((p, d, q), (0, 0, 0), 1)
    }

    pub fn validate(&self, complexity_cap: usize) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidArgument("seasonal period must be at least 1".into()));
        }
        if self.is_seasonal() && self.m < 2 {
            return Err(Error::InvalidArgument(format!("{self}: seasonal terms need m >= 2")));
        }
        if self.n_coefficients() > complexity_cap {
            return Err(Error::InvalidArgument(format!(
                "{self}: p+q+P+Q exceeds complexity cap {complexity_cap}"
            )));
        }
        Ok(())
    }

    pub fn is_seasonal(&self) -> bool {
        self.seasonal_p + self.seasonal_d + self.seasonal_q > 0
    }

    /// Number of ARMA coefficients, `p + q + P + Q`.
    pub fn n_coefficients(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    /// Parameter count used by the information criteria (coefficients plus variance).
    pub fn n_params(&self) -> usize {
        self.n_coefficients() + 1
    }

    pub fn differencing(&self) -> DifferenceSpec {
        DifferenceSpec::new(self.d, self.seasonal_d, self.m)
    }

    /// A constant mean is estimated only for undifferenced models.
    pub fn includes_mean(&self) -> bool {
        self.d + self.seasonal_d == 0
    }

    /// Largest AR or MA lag of the expanded model.
    pub fn max_lag(&self) -> usize {
        (self.p + self.seasonal_p * self.m).max(self.q + self.seasonal_q * self.m)
    }

    /// Sort key used for canonical trace ordering.
    pub fn key(&self) -> [usize; 7] {
        [self.p, self.d, self.q, self.seasonal_p, self.seasonal_d, self.seasonal_q, self.m]
    }
}

impl fmt::Display for SarimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})({},{},{}){{{}}}",
            self.p, self.d, self.q, self.seasonal_p, self.seasonal_d, self.seasonal_q, self.m
        )
    }
}

impl FromStr for SarimaOrder {
    type Err = Error;

    /// Accepts `p,d,q,P,D,Q,m`, `p,d,q` or the display form `(p,d,q)(P,D,Q){m}`.
    fn from_str(s: &str) -> Result<Self> {
        let nums: Vec<usize> = s
            .split(|c: char| !c.is_ascii_digit())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad order `{s}`: {e}")))?;
        match nums.as_slice() {
            [p, d, q] => Ok(Self::arima(*p, *d, *q)),
            [p, d, q, sp, sd, sq, m] => Ok(Self::new((*p, *d, *q), (*sp, *sd, *sq), *m)),
            _ => Err(Error::InvalidArgument(format!(
                "bad order `{s}`: expected 3 or 7 integers"
            ))),
        }
    }
}
