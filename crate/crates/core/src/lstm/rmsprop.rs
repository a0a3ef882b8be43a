use super::weights::LstmWeights;
use crate::scalar::Scalar;

/// Running average of squared gradients, one entry per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct RmsPropState<T> {
    pub v: LstmWeights<T>,
    pub rho: T,
    pub epsilon: T,
}

impl<T: Scalar> RmsPropState<T> {
    pub fn new(like: &LstmWeights<T>, rho: f64, epsilon: f64) -> Self {
        Self { v: LstmWeights::zeros(like.hidden, like.input_dim), rho: T::lit(rho), epsilon: T::lit(epsilon) }
    }
}

/// `v <- rho v + (1 - rho) g^2;  w <- w - lr g / (sqrt(v) + eps)`.
pub fn rmsprop_step<T: Scalar>(
    weights: &mut LstmWeights<T>,
    grads: &LstmWeights<T>,
    state: &mut RmsPropState<T>,
    learning_rate: T,
) {
    let (rho, eps) = (state.rho, state.epsilon);
    for ((w, &g), v) in weights.iter_mut().zip(grads.iter()).zip(state.v.iter_mut()) {
        *v = rho * *v + (T::one() - rho) * g * g;
        *w -= learning_rate * g / (v.sqrt() + eps);
    }
}
