//! Forward recursion of the cell:
//!
//! ```text
//! (i, f, o, g) = (sigma, sigma, sigma, tanh)(W [h_{t-1}; x_t] + b)
//! c_t = f * c_{t-1} + i * g
//! h_t = o * tanh(c_t)
//! ```

use super::weights::LstmWeights;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LstmState<T> {
    pub h: Vec<T>,
    pub c: Vec<T>,
}

impl<T: Scalar> LstmState<T> {
    pub fn zeros(hidden: usize) -> Self {
        Self { h: vec![T::zero(); hidden], c: vec![T::zero(); hidden] }
    }
}

/// Activations of one step, kept for backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCache<T> {
    pub i: Vec<T>,
    pub f: Vec<T>,
    pub o: Vec<T>,
    pub g: Vec<T>,
    pub c: Vec<T>,
    pub tanh_c: Vec<T>,
    pub h: Vec<T>,
    /// `[h_{t-1}; x_t]`
    pub hx: Vec<T>,
    pub c_prev: Vec<T>,
}

#[inline]
pub(crate) fn sigmoid<T: Scalar>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = T::zero();
    for (&x, &y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `W hx + b` into `out` (length `4H`).
fn preactivations<T: Scalar>(weights: &LstmWeights<T>, hx: &[T], out: &mut [T]) {
    let cols = weights.cols();
    for (r, (row, &bias)) in weights.w.chunks_exact(cols).zip(&weights.b).enumerate() {
        out[r] = dot(row, hx) + bias;
    }
}

fn check_step<T: Scalar>(weights: &LstmWeights<T>, x_t: &[T], state: &LstmState<T>) -> Result<()> {
    let h = weights.hidden;
    if x_t.len() != weights.input_dim || state.h.len() != h || state.c.len() != h {
        return Err(Error::Shape(format!(
            "step expects x of length {} and state of width {h}, got {} / {} / {}",
            weights.input_dim,
            x_t.len(),
            state.h.len(),
            state.c.len()
        )));
    }
    Ok(())
}

pub fn forward_step<T: Scalar>(
    weights: &LstmWeights<T>,
    x_t: &[T],
    state: &LstmState<T>,
) -> Result<(LstmState<T>, GateCache<T>)> {
    check_step(weights, x_t, state)?;
    Ok(step_unchecked(weights, x_t, state))
}

fn step_unchecked<T: Scalar>(
    weights: &LstmWeights<T>,
    x_t: &[T],
    state: &LstmState<T>,
) -> (LstmState<T>, GateCache<T>) {
    let h = weights.hidden;
    let mut hx = Vec::with_capacity(weights.cols());
    hx.extend_from_slice(&state.h);
    hx.extend_from_slice(x_t);
    let mut z = vec![T::zero(); 4 * h];
    preactivations(weights, &hx, &mut z);

    let i: Vec<T> = z[..h].iter().map(|&v| sigmoid(v)).collect();
    let f: Vec<T> = z[h..2 * h].iter().map(|&v| sigmoid(v)).collect();
    let o: Vec<T> = z[2 * h..3 * h].iter().map(|&v| sigmoid(v)).collect();
    let g: Vec<T> = z[3 * h..].iter().map(|&v| v.tanh()).collect();
    let c: Vec<T> = (0..h).map(|j| f[j] * state.c[j] + i[j] * g[j]).collect();
    let tanh_c: Vec<T> = c.iter().map(|&v| v.tanh()).collect();
    let h_new: Vec<T> = (0..h).map(|j| o[j] * tanh_c[j]).collect();

    let next = LstmState { h: h_new.clone(), c: c.clone() };
    let cache = GateCache { i, f, o, g, c, tanh_c, h: h_new, hx, c_prev: state.c.clone() };
    (next, cache)
}

/// Result of a training-mode pass over one window.
#[derive(Debug, Clone, PartialEq)]
pub struct SequencePass<T> {
    pub prediction: T,
    pub caches: Vec<GateCache<T>>,
    /// Inverted-dropout multipliers on `h_z` (`0` or `1/(1-rate)`), if any.
    pub mask: Option<Vec<T>>,
}

/// Runs the cell over `window` from a zero state and applies the readout
/// `w_out . (h_z * mask) + b_out`.
///
/// `window` holds `z * input_dim` values, oldest first.
pub fn forward_sequence<T: Scalar>(
    weights: &LstmWeights<T>,
    window: &[T],
    dropout_mask: Option<&[T]>,
) -> Result<SequencePass<T>> {
    let d = weights.input_dim;
    if window.is_empty() || window.len() % d != 0 {
        return Err(Error::Shape(format!("window length {} is not a multiple of {d}", window.len())));
    }
    if let Some(mask) = dropout_mask {
        if mask.len() != weights.hidden {
            return Err(Error::Shape(format!("mask length {} != {}", mask.len(), weights.hidden)));
        }
    }
    let mut state = LstmState::zeros(weights.hidden);
    let mut caches = Vec::with_capacity(window.len() / d);
    for x_t in window.chunks_exact(d) {
        let (next, cache) = step_unchecked(weights, x_t, &state);
        state = next;
        caches.push(cache);
    }
    let prediction = readout(weights, &state.h, dropout_mask);
    Ok(SequencePass { prediction, caches, mask: dropout_mask.map(<[T]>::to_vec) })
}

fn readout<T: Scalar>(weights: &LstmWeights<T>, h: &[T], mask: Option<&[T]>) -> T {
    match mask {
        Some(mask) => {
            let dropped: Vec<T> = h.iter().zip(mask).map(|(&h, &m)| h * m).collect();
            dot(&weights.w_out, &dropped) + weights.b_out
        }
        None => dot(&weights.w_out, h) + weights.b_out,
    }
}

/// Inference-mode prediction (no dropout, no caches).
pub fn predict_window<T: Scalar>(weights: &LstmWeights<T>, window: &[T]) -> T {
    let h = weights.hidden;
    let d = weights.input_dim;
    let mut hx = vec![T::zero(); weights.cols()];
    let mut c = vec![T::zero(); h];
    let mut z = vec![T::zero(); 4 * h];
    for x_t in window.chunks_exact(d) {
        hx[h..].copy_from_slice(x_t);
        preactivations(weights, &hx, &mut z);
        for j in 0..h {
            let i = sigmoid(z[j]);
            let f = sigmoid(z[h + j]);
            let o = sigmoid(z[2 * h + j]);
            let g = z[3 * h + j].tanh();
            c[j] = f * c[j] + i * g;
            hx[j] = o * c[j].tanh();
        }
    }
    readout(weights, &hx[..h], None)
}
