//! Lag-polynomial helpers.
//!
//! Polynomials are dense coefficient vectors indexed by lag, constant term first.

use crate::scalar::Scalar;

/// Minimum distance of roots outside the unit circle.
pub const ROOT_MARGIN: f64 = 1e-3;

pub fn multiply<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == T::zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `1 - c_1 B^s - c_2 B^{2s} - ...` for AR-type coefficients.
pub fn ar_polynomial<T: Scalar>(coeffs: &[T], stride: usize) -> Vec<T> {
    let mut poly = vec![T::zero(); coeffs.len() * stride + 1];
    poly[0] = T::one();
    for (i, &c) in coeffs.iter().enumerate() {
        poly[(i + 1) * stride] = -c;
    }
    poly
}

/// `1 + c_1 B^s + c_2 B^{2s} + ...` for MA-type coefficients.
pub fn ma_polynomial<T: Scalar>(coeffs: &[T], stride: usize) -> Vec<T> {
    let mut poly = vec![T::zero(); coeffs.len() * stride + 1];
    poly[0] = T::one();
    for (i, &c) in coeffs.iter().enumerate() {
        poly[(i + 1) * stride] = c;
    }
    poly
}

/// Non-zero lag terms `(lag, c)` of `poly`, skipping the constant.
pub fn sparse_terms<T: Scalar>(poly: &[T], sign: T) -> Vec<(usize, T)> {
    poly.iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| **c != T::zero())
        .map(|(lag, &c)| (lag, sign * c))
        .collect()
}

/// True when every root of `1 - a_1 z - ... - a_p z^p` lies outside `|z| = 1 + margin`.
///
/// Uses the Schur–Cohn step-down recursion: the polynomial is stable exactly
/// when all implied partial autocorrelations have modulus below one.
pub fn ar_is_stationary<T: Scalar>(coeffs: &[T], margin: f64) -> bool {
    // roots of phi(z) beyond radius r  <=>  roots of phi(r w) beyond 1
    let radius = T::lit(1.0 + margin);
    let mut a: Vec<T> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c * radius.powi(i as i32 + 1))
        .collect();
    while let Some(&last) = a.last() {
        if last == T::zero() {
            a.pop();
            continue;
        }
        if !(last.abs() < T::one()) {
            return false;
        }
        let p = a.len();
        let denom = T::one() - last * last;
        let prev: Vec<T> = (0..p - 1).map(|i| (a[i] + last * a[p - 2 - i]) / denom).collect();
        a = prev;
    }
    true
}

/// True when every root of `1 + c_1 z + ... + c_q z^q` lies outside `|z| = 1 + margin`.
pub fn ma_is_invertible<T: Scalar>(coeffs: &[T], margin: f64) -> bool {
    let negated: Vec<T> = coeffs.iter().map(|&c| -c).collect();
    ar_is_stationary(&negated, margin)
}

/// MA(infinity) weights `psi_0..psi_{n-1}` of `ar(B) x_t = ma(B) e_t`,
/// where `ar` and `ma` are full polynomials with unit constant term.
pub fn psi_weights<T: Scalar>(ar: &[T], ma: &[T], n: usize) -> Vec<T> {
    let mut psi = vec![T::zero(); n];
    for j in 0..n {
        let mut v = ma.get(j).copied().unwrap_or_else(T::zero);
        for k in 1..=j.min(ar.len().saturating_sub(1)) {
            v -= ar[k] * psi[j - k];
        }
        psi[j] = v;
    }
    psi
}
