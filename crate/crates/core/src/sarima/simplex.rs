//! Derivative-free Nelder–Mead minimizer.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Stop when `f_worst - f_best <= rel_tol * |f_best|` ...
    pub rel_tol: f64,
    /// ... and every vertex is within `x_tol` of the best one (max norm).
    pub x_tol: f64,
    pub initial_step: f64,
    /// Restarts from the incumbent after a converged run.
    pub restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_iterations: 1000, rel_tol: 1e-8, x_tol: 1e-6, initial_step: 0.1, restarts: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

pub fn minimize<T, F>(mut f: F, start: &[T], opts: &SimplexOptions) -> SimplexResult<T>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    let n = start.len();
    if n == 0 {
        let value = f(start);
        return SimplexResult { x: Vec::new(), value, iterations: 0, converged: true };
    }

    let mut best_x = start.to_vec();
    let mut best_value = f(start);
    let mut iterations = 0;
    let mut converged = false;
    for attempt in 0..=opts.restarts {
        let budget = opts.max_iterations.saturating_sub(iterations);
        let (x, value, used, ok) = run(&mut f, &best_x, opts, budget);
        iterations += used;
        let gain = best_value - value;
        if value < best_value {
            best_x = x;
            best_value = value;
        }
        converged = ok;
        // a restart that cannot improve confirms the optimum
        if !ok || (attempt > 0 && gain <= T::lit(opts.rel_tol) * best_value.abs()) {
            break;
        }
    }
    SimplexResult { x: best_x, value: best_value, iterations, converged }
}

fn run<T, F>(f: &mut F, start: &[T], opts: &SimplexOptions, budget: usize) -> (Vec<T>, T, usize, bool)
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    let n = start.len();
    let (alpha, gamma, rho, sigma) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));
    let step = T::lit(opts.initial_step);

    let mut points: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    points.push(start.to_vec());
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step;
        points.push(p);
    }
    let mut values: Vec<T> = points.iter().map(|p| f(p)).collect();
    let mut order: Vec<usize> = (0..=n).collect();

    let mut centroid = vec![T::zero(); n];
    let mut trial = vec![T::zero(); n];
    let mut trial2 = vec![T::zero(); n];

    for iter in 0..budget {
        // stable sort keeps vertex order deterministic on ties
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let (best, worst, second) = (order[0], order[n], order[n - 1]);
        let spread = values[worst] - values[best];
        let size = points
            .iter()
            .flat_map(|p| p.iter().zip(&points[best]).map(|(&a, &b)| (a - b).abs()))
            .fold(T::zero(), T::max);
        if spread <= T::lit(opts.rel_tol) * values[best].abs() && size <= T::lit(opts.x_tol) {
            return (points[best].clone(), values[best], iter, true);
        }

        centroid.iter_mut().for_each(|c| *c = T::zero());
        for &idx in &order[..n] {
            for (c, &x) in centroid.iter_mut().zip(&points[idx]) {
                *c += x;
            }
        }
        let nf = T::from_usize_lossy(n);
        centroid.iter_mut().for_each(|c| *c /= nf);

        for j in 0..n {
            trial[j] = centroid[j] + alpha * (centroid[j] - points[worst][j]);
        }
        let f_reflect = f(&trial);

        if f_reflect < values[best] {
            for j in 0..n {
                trial2[j] = centroid[j] + gamma * (trial[j] - centroid[j]);
            }
            let f_expand = f(&trial2);
            if f_expand < f_reflect {
                points[worst].copy_from_slice(&trial2);
                values[worst] = f_expand;
            } else {
                points[worst].copy_from_slice(&trial);
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[second] {
            points[worst].copy_from_slice(&trial);
            values[worst] = f_reflect;
            continue;
        }

        let outside = f_reflect < values[worst];
        for j in 0..n {
            trial2[j] = if outside {
                centroid[j] + rho * (trial[j] - centroid[j])
            } else {
                centroid[j] + rho * (points[worst][j] - centroid[j])
            };
        }
        let f_contract = f(&trial2);
        let accept = if outside { f_contract <= f_reflect } else { f_contract < values[worst] };
        if accept {
            points[worst].copy_from_slice(&trial2);
            values[worst] = f_contract;
            continue;
        }

        let anchor = points[best].clone();
        for &idx in &order[1..] {
            for j in 0..n {
                points[idx][j] = anchor[j] + sigma * (points[idx][j] - anchor[j]);
            }
            values[idx] = f(&points[idx]);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap();
    (points[best].clone(), values[best], budget, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let r = minimize(
            |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 0.5).powi(2) + 3.0,
            &[0.1, -0.1],
            &SimplexOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] + 0.5).abs() < 1e-3, "{:?}", r.x);
        assert!((r.value - 3.0).abs() < 1e-7);
    }

    #[test]
    fn rosenbrock_within_budget() {
        let opts = SimplexOptions { max_iterations: 5000, ..Default::default() };
        let r = minimize(
            |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2) + 1.0,
            &[-1.2, 1.0],
            &opts,
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-2 && (r.x[1] - 1.0).abs() < 2e-2, "{:?}", r.x);
    }

    #[test]
    fn reports_non_convergence() {
        let opts = SimplexOptions { max_iterations: 3, restarts: 0, ..Default::default() };
        let r = minimize(|x: &[f64]| x.iter().map(|v| (v - 5.0).powi(2)).sum::<f64>() + 1.0, &[0.0, 0.0, 0.0], &opts);
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| (x[0] * 3.0).sin() + x[0] * x[0];
        let start = [0.7];
        let r = minimize(f, &start, &SimplexOptions::default());
        assert!(r.value <= f(&start));
    }
}
