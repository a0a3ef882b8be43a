use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::LstmConfig;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gate blocks of `w` and `b`, top to bottom.
pub const GATE_ORDER: [&str; 4] = ["i", "f", "o", "g"];

/// Parameters of the cell and the dense readout.
///
/// `w` is row-major with shape `4H x (H + input_dim)`; its columns multiply
/// `[h_{t-1}; x_t]`, its rows are the `i, f, o, g` blocks of `H` rows each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LstmWeights<T> {
    pub hidden: usize,
    pub input_dim: usize,
    pub gate_order: Vec<String>,
    pub w_shape: [usize; 2],
    pub w: Vec<T>,
    pub b: Vec<T>,
    pub w_out: Vec<T>,
    pub b_out: T,
}

impl<T: Scalar> LstmWeights<T> {
    pub fn zeros(hidden: usize, input_dim: usize) -> Self {
        let cols = hidden + input_dim;
        Self {
            hidden,
            input_dim,
            gate_order: GATE_ORDER.iter().map(|s| s.to_string()).collect(),
            w_shape: [4 * hidden, cols],
            w: vec![T::zero(); 4 * hidden * cols],
            b: vec![T::zero(); 4 * hidden],
            w_out: vec![T::zero(); hidden],
            b_out: T::zero(),
        }
    }

    pub fn cols(&self) -> usize {
        self.hidden + self.input_dim
    }

    pub fn n_params(&self) -> usize {
        self.w.len() + self.b.len() + self.w_out.len() + 1
    }

    /// Checks shapes, gate order and finiteness, e.g. after deserializing.
    pub fn validate(&self) -> Result<()> {
        let h = self.hidden;
        let ok_order = self.gate_order.iter().map(String::as_str).eq(GATE_ORDER);
        if !ok_order {
            return Err(Error::Shape(format!("gate order {:?}, expected {GATE_ORDER:?}", self.gate_order)));
        }
        if h == 0
            || self.input_dim == 0
            || self.w_shape != [4 * h, self.cols()]
            || self.w.len() != 4 * h * self.cols()
            || self.b.len() != 4 * h
            || self.w_out.len() != h
        {
            return Err(Error::Shape(format!(
                "inconsistent weight shapes for hidden={h}, input_dim={}",
                self.input_dim
            )));
        }
        if !self.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("weights contain non-finite values".into()));
        }
        Ok(())
    }

    /// All parameters in a fixed order: `w`, `b`, `w_out`, `b_out`.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.w.iter().chain(&self.b).chain(&self.w_out).chain(std::iter::once(&self.b_out))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.w
            .iter_mut()
            .chain(self.b.iter_mut())
            .chain(self.w_out.iter_mut())
            .chain(std::iter::once(&mut self.b_out))
    }

    pub fn norm(&self) -> T {
        self.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, &b) in self.iter_mut().zip(other.iter()) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: T) {
        for a in self.iter_mut() {
            *a *= factor;
        }
    }
}

/// Glorot-uniform gate blocks, zero biases except the forget block (1.0).
pub fn init_weights<T: Scalar>(config: &LstmConfig) -> LstmWeights<T> {
    init_weights_with_input(config, 1)
}

pub fn init_weights_with_input<T: Scalar>(config: &LstmConfig, input_dim: usize) -> LstmWeights<T> {
    let h = config.units;
    let mut weights = LstmWeights::zeros(h, input_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let gate_limit = (6.0 / ((h + input_dim) + h) as f64).sqrt();
    for v in weights.w.iter_mut() {
        *v = T::lit(rng.random_range(-gate_limit..gate_limit));
    }
    let out_limit = (6.0 / (h + 1) as f64).sqrt();
    for v in weights.w_out.iter_mut() {
        *v = T::lit(rng.random_range(-out_limit..out_limit));
    }
    for v in &mut weights.b[h..2 * h] {
        *v = T::one();
    }
    weights
}
