#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn fixture_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sp500_fixture.csv")
}

pub fn fixture_series() -> tsforecast::Series {
    let bytes = std::fs::read(fixture_path()).expect("fixture present");
    let ohlcv = tsforecast::data::parse_csv(&bytes, "^GSPC").unwrap();
    tsforecast::data::clean(&tsforecast::data::extract_open(&ohlcv).unwrap()).unwrap()
}

pub fn gaussian(n: usize, sd: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sd).unwrap();
    (0..n).map(|_| normal.sample(&mut rng)).collect()
}

pub fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    gaussian(n, 1.0, seed).into_iter().map(|e| 50.0 + e).collect()
}

/// AR(1) with 200 burn-in steps discarded.
pub fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let e = gaussian(n + 200, 1.0, seed);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for (t, &shock) in e.iter().enumerate() {
        x = phi * x + shock;
        if t >= 200 {
            out.push(x);
        }
    }
    out
}

pub fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    gaussian(n, 1.0, seed)
        .iter()
        .scan(100.0, |s, e| {
            *s += e;
            Some(*s)
        })
        .collect()
}

/// SARIMA(0,1,1)(0,1,1){m}: w_t = e_t + theta e_{t-1} + Theta e_{t-m} + theta Theta e_{t-m-1},
/// integrated once seasonally and once regularly.
pub fn airline(theta: f64, seasonal_theta: f64, m: usize, n: usize, seed: u64) -> Vec<f64> {
    let burn = 4 * m;
    let total = n + burn;
    let e = gaussian(total, 1.0, seed);
    let shock = |t: usize, lag: usize| if t >= lag { e[t - lag] } else { 0.0 };
    let w: Vec<f64> = (0..total)
        .map(|t| e[t] + theta * shock(t, 1) + seasonal_theta * shock(t, m) + theta * seasonal_theta * shock(t, m + 1))
        .collect();
    // (1 - B^m) y = w, then (1 - B) x = y
    let mut y = vec![0.0; total];
    for t in 0..total {
        y[t] = w[t] + if t >= m { y[t - m] } else { 0.0 };
    }
    let mut x = vec![0.0; total];
    for t in 0..total {
        x[t] = y[t] + if t >= 1 { x[t - 1] } else { 100.0 };
    }
    x.split_off(burn)
}

/// Largest relative error between BPTT gradients and central differences
/// for a random `hidden`-unit network on `batch` windows of length `z`.
pub fn gradient_check(hidden: usize, z: usize, batch: usize, step: f64, dropout: Option<f64>, seed: u64) -> f64 {
    use tsforecast::lstm::{backward, forward_sequence, init_weights, LstmConfig, LstmWeights};

    let config = LstmConfig { units: hidden, lookback: z, seed, ..Default::default() };
    let mut weights: LstmWeights<f64> = init_weights(&config);
    // non-trivial biases so every gate path carries gradient
    let noise = gaussian(weights.b.len() + 1, 0.3, seed + 1);
    for (b, n) in weights.b.iter_mut().zip(&noise) {
        *b += n;
    }
    weights.b_out = noise[noise.len() - 1];

    let windows: Vec<Vec<f64>> = (0..batch).map(|i| gaussian(z, 1.0, seed + 10 + i as u64)).collect();
    let targets = gaussian(batch, 1.0, seed + 100);
    let masks: Vec<Option<Vec<f64>>> = (0..batch)
        .map(|i| {
            dropout.map(|rate| {
                let u = gaussian(hidden, 1.0, seed + 200 + i as u64);
                u.iter().map(|&v| if v < -0.5 { 0.0 } else { 1.0 / (1.0 - rate) }).collect()
            })
        })
        .collect();

    let loss = |w: &LstmWeights<f64>| -> f64 {
        windows
            .iter()
            .zip(&masks)
            .zip(&targets)
            .map(|((x, m), y)| (forward_sequence(w, x, m.as_deref()).unwrap().prediction - y).powi(2))
            .sum::<f64>()
            / batch as f64
    };

    let passes: Vec<_> = windows
        .iter()
        .zip(&masks)
        .map(|(x, m)| forward_sequence(&weights, x, m.as_deref()).unwrap())
        .collect();
    let (grads, _) = backward(&weights, &passes, &targets).unwrap();
    let analytic: Vec<f64> = grads.iter().copied().collect();

    let mut worst: f64 = 0.0;
    for (i, &g) in analytic.iter().enumerate() {
        let mut plus = weights.clone();
        *plus.iter_mut().nth(i).unwrap() += step;
        let mut minus = weights.clone();
        *minus.iter_mut().nth(i).unwrap() -= step;
        let numeric = (loss(&plus) - loss(&minus)) / (2.0 * step);
        let rel = (g - numeric).abs() / g.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    worst
}

/// Noiseless sine with the given period, shifted to stay positive.
pub fn sine(n: usize, period: f64) -> Vec<f64> {
    (0..n).map(|t| 10.0 + (2.0 * std::f64::consts::PI * t as f64 / period).sin()).collect()
}
