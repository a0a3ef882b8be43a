//! Backpropagation through time for the batch mean-squared error.

use super::cell::SequencePass;
use super::weights::LstmWeights;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gradients of `(1/n) sum (y_hat - y)^2` over the batch, and the loss itself.
pub fn backward<T: Scalar>(
    weights: &LstmWeights<T>,
    passes: &[SequencePass<T>],
    targets: &[T],
) -> Result<(LstmWeights<T>, T)> {
    if passes.len() != targets.len() || passes.is_empty() {
        return Err(Error::Shape(format!(
            "{} forward passes for {} targets",
            passes.len(),
            targets.len()
        )));
    }
    let n = T::from_usize_lossy(passes.len());
    let mut grads = LstmWeights::zeros(weights.hidden, weights.input_dim);
    let mut loss = T::zero();
    for (pass, &y) in passes.iter().zip(targets) {
        let err = pass.prediction - y;
        loss += err * err;
        accumulate(weights, pass, T::lit(2.0) * err / n, &mut grads)?;
    }
    Ok((grads, loss / n))
}

/// Adds the gradient of `dy * y_hat` for one window into `grads`.
fn accumulate<T: Scalar>(
    weights: &LstmWeights<T>,
    pass: &SequencePass<T>,
    dy: T,
    grads: &mut LstmWeights<T>,
) -> Result<()> {
    let h = weights.hidden;
    let cols = weights.cols();
    let last = pass
        .caches
        .last()
        .ok_or_else(|| Error::Shape("forward pass has no steps".into()))?;
    if last.h.len() != h {
        return Err(Error::Shape(format!("cache width {} != {h}", last.h.len())));
    }

    // readout
    let mut dh = vec![T::zero(); h];
    for j in 0..h {
        let m = pass.mask.as_ref().map_or(T::one(), |m| m[j]);
        grads.w_out[j] += dy * last.h[j] * m;
        dh[j] = dy * weights.w_out[j] * m;
    }
    grads.b_out += dy;

    let mut dc_next = vec![T::zero(); h];
    let mut da = vec![T::zero(); 4 * h];
    for cache in pass.caches.iter().rev() {
        for j in 0..h {
            let (i, f, o, g, tc) = (cache.i[j], cache.f[j], cache.o[j], cache.g[j], cache.tanh_c[j]);
            let d_o = dh[j] * tc;
            let dc = dc_next[j] + dh[j] * o * (T::one() - tc * tc);
            let di = dc * g;
            let dg = dc * i;
            let df = dc * cache.c_prev[j];
            dc_next[j] = dc * f;
            da[j] = di * i * (T::one() - i);
            da[h + j] = df * f * (T::one() - f);
            da[2 * h + j] = d_o * o * (T::one() - o);
            da[3 * h + j] = dg * (T::one() - g * g);
        }
        dh.iter_mut().for_each(|v| *v = T::zero());
        for (r, &a) in da.iter().enumerate() {
            grads.b[r] += a;
            if a == T::zero() {
                continue;
            }
            let row = &weights.w[r * cols..(r + 1) * cols];
            let grow = &mut grads.w[r * cols..(r + 1) * cols];
            for (gw, &x) in grow.iter_mut().zip(&cache.hx) {
                *gw += a * x;
            }
            for (d, &wv) in dh.iter_mut().zip(&row[..h]) {
                *d += a * wv;
            }
        }
    }
    Ok(())
}

/// Rescales `grads` so its global norm is at most `max_norm`; returns the original norm.
pub fn clip_global_norm<T: Scalar>(grads: &mut LstmWeights<T>, max_norm: T) -> T {
    let norm = grads.norm();
    if norm > max_norm {
        grads.scale(max_norm / norm);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::super::cell::forward_sequence;
    use super::super::config::LstmConfig;
    use super::super::weights::init_weights;
    use super::*;

    #[test]
    fn output_bias_gradient() {
        let w: LstmWeights<f64> = init_weights(&LstmConfig { units: 3, seed: 1, ..Default::default() });
        let pass = forward_sequence(&w, &[0.1, 0.5, 0.2], None).unwrap();
        let y = 0.3;
        let (g, loss) = backward(&w, std::slice::from_ref(&pass), &[y]).unwrap();
        assert_eq!(g.b_out, 2.0 * (pass.prediction - y));
        assert_eq!(loss, (pass.prediction - y).powi(2));
    }

    #[test]
    fn zero_error_zero_gradient() {
        let w: LstmWeights<f64> = init_weights(&LstmConfig { units: 3, seed: 2, ..Default::default() });
        let pass = forward_sequence(&w, &[0.1, 0.5], None).unwrap();
        let (g, loss) = backward(&w, std::slice::from_ref(&pass), &[pass.prediction]).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn clip_scales_to_bound() {
        let mut g = LstmWeights::<f64>::zeros(1, 1);
        g.b_out = 30.0;
        g.w_out[0] = 40.0;
        assert_eq!(clip_global_norm(&mut g, 5.0), 50.0);
        assert!((g.norm() - 5.0).abs() < 1e-12);
        let before = g.clone();
        clip_global_norm(&mut g, 10.0);
        assert_eq!(g, before);
    }

    #[test]
    fn mismatched_batch_is_shape_error() {
        let w = LstmWeights::<f64>::zeros(2, 1);
        let pass = forward_sequence(&w, &[0.1], None).unwrap();
        assert!(matches!(backward(&w, &[pass], &[1.0, 2.0]), Err(Error::Shape(_))));
    }
}
