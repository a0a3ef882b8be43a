//! Stepwise order search over `(p, q, P, Q)` with fixed differencing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::{fit_with, AicConvention, FitOptions, SarimaModel};
use super::order::{SarimaOrder, DEFAULT_COMPLEXITY_CAP};
use crate::error::{Error, Result};
use crate::preprocess::{difference, DifferenceSpec};
use crate::scalar::{variance, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Aic,
    Bic,
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Self::Aic),
            "bic" => Ok(Self::Bic),
            other => Err(Error::InvalidArgument(format!("unknown criterion `{other}`"))),
        }
    }
}

/// One evaluated candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub order: SarimaOrder,
    pub aic: f64,
    pub bic: f64,
}

impl TraceEntry {
    pub fn score(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Aic => self.aic,
            Criterion::Bic => self.bic,
        }
    }
}

/// Lowest-scoring entry; ties go to the canonically smaller order.
pub fn best_by(trace: &[TraceEntry], criterion: Criterion) -> Option<&TraceEntry> {
    trace.iter().filter(|e| e.score(criterion).is_finite()).min_by(|a, b| {
        a.score(criterion)
            .total_cmp(&b.score(criterion))
            .then_with(|| a.order.key().cmp(&b.order.key()))
    })
}

#[derive(Debug, Clone, Copy)]
pub struct StepwiseOptions {
    pub criterion: Criterion,
    pub max_p: usize,
    pub max_q: usize,
    pub max_seasonal_p: usize,
    pub max_seasonal_q: usize,
    pub max_d: usize,
    pub max_seasonal_d: usize,
    pub complexity_cap: usize,
    /// A differencing step is taken only if it cuts the sample variance below
    /// this fraction of the current variance.
    pub variance_ratio: f64,
    pub max_steps: usize,
    pub fit: FitOptions,
}

impl Default for StepwiseOptions {
    fn default() -> Self {
        Self {
            criterion: Criterion::Aic,
            max_p: 5,
            max_q: 5,
            max_seasonal_p: 2,
            max_seasonal_q: 2,
            max_d: 2,
            max_seasonal_d: 1,
            complexity_cap: DEFAULT_COMPLEXITY_CAP,
            variance_ratio: 0.5,
            max_steps: 100,
            fit: FitOptions::default(),
        }
    }
}

/// Chooses `(d, D)` by greedy variance reduction over successive differences.
///
/// At each step the regular and (when `m >= 2`) seasonal differences are
/// tried; the one with the smaller variance is kept if that variance is below
/// `variance_ratio` times the current one.
pub fn choose_differencing<T: Scalar>(values: &[T], m: usize, opts: &StepwiseOptions) -> (usize, usize) {
    let (mut d, mut seasonal_d) = (0, 0);
    let mut current = values.to_vec();
    loop {
        let base = variance(&current).as_f64();
        let mut candidates = Vec::new();
        if d < opts.max_d {
            candidates.push((1, 0, DifferenceSpec::new(1, 0, 1)));
        }
        if m >= 2 && seasonal_d < opts.max_seasonal_d {
            candidates.push((0, 1, DifferenceSpec::new(0, 1, m)));
        }
        let best = candidates
            .into_iter()
            .filter(|(_, _, spec)| current.len() > spec.lost() + 2)
            .map(|(dd, ds, spec)| {
                let next = difference(&current, &spec).expect("length checked");
                (variance(&next).as_f64(), dd, ds, next)
            })
            .filter(|(v, ..)| v.is_finite())
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match best {
            Some((v, dd, ds, next)) if v < opts.variance_ratio * base => {
                d += dd;
                seasonal_d += ds;
                current = next;
            }
            _ => return (d, seasonal_d),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Selection<T> {
    pub model: SarimaModel<T>,
    /// Every successfully fitted candidate, sorted by order.
    pub trace: Vec<TraceEntry>,
}

/// Hill-climbing order search.
///
/// Differencing is fixed first by [`choose_differencing`]. The search starts
/// from `(2,d,2)(1,D,1)` together with the null, AR and MA seeds and then moves
/// to the best `±1` neighbour in one of `p, q, P, Q` while the criterion improves.
pub fn stepwise_select<T: Scalar>(values: &[T], m: usize, opts: &StepwiseOptions) -> Result<Selection<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("seasonal period must be at least 1".into()));
    }
    let (d, seasonal_d) = choose_differencing(values, m, opts);
    let seasonal = m >= 2;
    let make = |p, q, sp, sq| {
        if seasonal {
            SarimaOrder::new((p, d, q), (sp, seasonal_d, sq), m)
        } else {
            SarimaOrder::new((p, d, q), (0, 0, 0), 1)
        }
    };

    let mut fitted: BTreeMap<[usize; 7], Option<(SarimaModel<T>, TraceEntry)>> = BTreeMap::new();
    let mut evaluate = |order: SarimaOrder| -> Option<f64> {
        let entry = fitted.entry(order.key()).or_insert_with(|| {
            let model = fit_with(values, order, &opts.fit).ok()?;
            let entry = TraceEntry {
                order,
                aic: model.aic(AicConvention::Standard).as_f64(),
                bic: model.bic().as_f64(),
            };
            Some((model, entry))
        });
        entry.as_ref().map(|(_, e)| e.score(opts.criterion))
    };

    let within = |o: &SarimaOrder| {
        o.p <= opts.max_p
            && o.q <= opts.max_q
            && o.seasonal_p <= opts.max_seasonal_p
            && o.seasonal_q <= opts.max_seasonal_q
            && o.n_coefficients() <= opts.complexity_cap
    };

    let seeds = [make(2, 2, 1, 1), make(0, 0, 0, 0), make(1, 0, 1, 0), make(0, 1, 0, 1)];
    let mut current: Option<(SarimaOrder, f64)> = None;
    for seed in seeds.into_iter().filter(within) {
        if let Some(score) = evaluate(seed) {
            if current.is_none_or(|(o, s)| better((seed, score), (o, s))) {
                current = Some((seed, score));
            }
        }
    }

    for _ in 0..opts.max_steps {
        let Some((order, score)) = current else { break };
        let mut neighbours = Vec::new();
        let (p, q, sp, sq) = (order.p, order.q, order.seasonal_p, order.seasonal_q);
        for (dp, dq, dsp, dsq) in [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)] {
            if !seasonal && (dsp + dsq) > 0 {
                continue;
            }
            neighbours.push(make(p + dp, q + dq, sp + dsp, sq + dsq));
            if p >= dp && q >= dq && sp >= dsp && sq >= dsq {
                neighbours.push(make(p - dp, q - dq, sp - dsp, sq - dsq));
            }
        }
        neighbours.sort_by_key(SarimaOrder::key);
        let mut next = (order, score);
        for candidate in neighbours.into_iter().filter(within) {
            if let Some(s) = evaluate(candidate) {
                if better((candidate, s), next) {
                    next = (candidate, s);
                }
            }
        }
        if next.0 == order {
            break;
        }
        current = Some(next);
    }

    let (best, _) = current.ok_or_else(|| Error::Selection("no candidate order could be fitted".into()))?;
    let mut trace: Vec<TraceEntry> = fitted.values().flatten().map(|(_, e)| *e).collect();
    trace.sort_by_key(|e| e.order.key());
    let model = fitted
        .remove(&best.key())
        .flatten()
        .map(|(m, _)| m)
        .expect("best order was fitted");
    Ok(Selection { model, trace })
}

fn better(a: (SarimaOrder, f64), b: (SarimaOrder, f64)) -> bool {
    a.1 < b.1 || (a.1 == b.1 && a.0.key() < b.0.key())
}
