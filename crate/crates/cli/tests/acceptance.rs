//! Acceptance suite: ten criteria, run in order on one thread so timings are
//! not disturbed, one PASS/FAIL line each.
//!
//! Run with `cargo test -p tsforecast-cli --test acceptance`;
//! set `ACCEPTANCE_ONLY=1,4` to run a subset.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsforecast::data::{split, DataSplit, SplitRatios, UnivariateSeries};
use tsforecast::eval::lookback_grid;
use tsforecast::lstm::{train, LstmConfig, TrainedLstm};
use tsforecast::preprocess::{difference, fit_rescale, integrate, inverse_rescale, DifferenceSpec};
use tsforecast::sarima::{
    self, best_by, fit, stepwise_select, AicConvention, Criterion, SarimaModel, SarimaOrder, StepwiseOptions,
    TraceEntry,
};

type Outcome = Result<String, String>;

struct Check {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn dated(values: Vec<f64>) -> tsforecast::Series {
    let start = NaiveDate::from_ymd_opt(2015, 1, 1).unwrap();
    let dates = (0..values.len()).map(|i| start + Days::new(i as u64)).collect();
    UnivariateSeries::new(dates, values).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn information_criteria() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let ll = rng.random_range(-1e4..1e3);
        let n = rng.random_range(10..10_000usize);
        let k = rng.random_range(1..13usize);
        let (llf, nf, kf) = (ll, n as f64, k as f64);
        let standard = -2.0 * llf + 2.0 * kf;
        let normalized = -2.0 / nf * llf + 2.0 * kf / nf;
        let bic = -2.0 * llf + nf.ln() * kf;
        worst = worst
            .max(rel(sarima::aic(ll, n, k, AicConvention::Standard), standard))
            .max(rel(sarima::aic(ll, n, k, AicConvention::Normalized), normalized))
            .max(rel(sarima::bic(ll, n, k), bic));
    }
    ensure(worst <= 1e-12, format!("max relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:e}"))
}

fn parameter_recovery() -> Outcome {
    let ar = fit(&common::ar1(0.7, 2000, 7), SarimaOrder::arima(1, 0, 0)).map_err(|e| e.to_string())?;
    let phi = ar.ar[0];
    ensure((0.62..=0.78).contains(&phi), format!("phi {phi}"))?;
    let air = fit(&common::airline(0.4, 0.6, 12, 600, 8), SarimaOrder::new((0, 1, 1), (0, 1, 1), 12))
        .map_err(|e| e.to_string())?;
    let (theta, big_theta) = (air.ma[0], air.sma[0]);
    ensure((theta - 0.4).abs() <= 0.15, format!("theta {theta}"))?;
    ensure((big_theta - 0.6).abs() <= 0.15, format!("Theta {big_theta}"))?;
    Ok(format!("phi {phi:.4}, theta {theta:.4}, Theta {big_theta:.4}"))
}

fn stepwise_sanity() -> Outcome {
    let opts = StepwiseOptions::default();
    let ar = stepwise_select(&common::ar1(0.7, 2000, 7), 12, &opts).map_err(|e| e.to_string())?;
    let o = ar.model.order;
    ensure((o.d, o.seasonal_d) == (0, 0), format!("AR(1) selected {o}"))?;
    let air = stepwise_select(&common::airline(0.4, 0.6, 12, 600, 8), 12, &opts).map_err(|e| e.to_string())?;
    let a = air.model.order;
    ensure((a.d, a.seasonal_d) == (1, 1), format!("airline selected {a}"))?;

    let noise = common::white_noise(500, 11);
    let wn = stepwise_select(&noise, 12, &opts).map_err(|e| e.to_string())?;
    let w = wn.model.order;
    ensure([w.p, w.d, w.q, w.seasonal_p, w.seasonal_d, w.seasonal_q] == [0; 6], format!("white noise selected {w}"))?;
    // exhaustive check over every order up to (1,0,1)(1,0,1)
    let chosen = wn.model.aic(AicConvention::Standard);
    for bits in 1..16usize {
        let (p, q, sp, sq) = (bits & 1, bits >> 1 & 1, bits >> 2 & 1, bits >> 3 & 1);
        let order = SarimaOrder::new((p, 0, q), (sp, 0, sq), 12);
        if let Ok(m) = fit(&noise, order) {
            let aic = m.aic(AicConvention::Standard);
            ensure(aic >= chosen, format!("{order} has aic {aic} < {chosen}"))?;
        }
    }
    Ok(format!("AR(1) -> {o}, airline -> {a}, white noise -> {w}"))
}

fn table_argmin() -> Outcome {
    let rows = [
        ((0, 2, 1), (0, 1, 1), 3103.69, 3116.52),
        ((1, 2, 1), (0, 1, 1), 3102.47, 3119.57),
        ((0, 2, 1), (1, 1, 1), 3105.63, 3122.73),
        ((2, 2, 1), (0, 1, 1), 3104.16, 3125.65),
        ((1, 2, 1), (1, 1, 1), 3104.39, 3125.77),
        ((3, 2, 1), (0, 1, 1), 3106.70, 3131.36),
    ];
    let trace: Vec<TraceEntry> = rows
        .iter()
        .map(|&(o, s, aic, bic)| TraceEntry { order: SarimaOrder::new(o, s, 12), aic, bic })
        .collect();
    let by_aic = best_by(&trace, Criterion::Aic).ok_or("empty")?.order;
    let by_bic = best_by(&trace, Criterion::Bic).ok_or("empty")?.order;
    ensure(by_aic == SarimaOrder::new((1, 2, 1), (0, 1, 1), 12), format!("aic picked {by_aic}"))?;
    ensure(by_bic == SarimaOrder::new((0, 2, 1), (0, 1, 1), 12), format!("bic picked {by_bic}"))?;
    Ok(format!("aic -> {by_aic}, bic -> {by_bic}"))
}

fn interval_monotonicity() -> Outcome {
    let mut fitted: Vec<SarimaModel<f64>> = Vec::new();
    let cases = [
        (common::ar1(0.7, 500, 1), SarimaOrder::arima(1, 0, 0)),
        (common::ar1(-0.5, 500, 2), SarimaOrder::arima(2, 0, 1)),
        (common::white_noise(300, 5), SarimaOrder::arima(0, 0, 1)),
        (common::random_walk(500, 3), SarimaOrder::arima(1, 1, 1)),
        (common::airline(0.4, 0.6, 12, 400, 3), SarimaOrder::new((0, 1, 1), (0, 1, 1), 12)),
        (common::airline(0.4, 0.6, 12, 400, 4), SarimaOrder::new((1, 1, 1), (1, 1, 0), 12)),
        (common::airline(0.3, 0.5, 12, 400, 5), SarimaOrder::new((1, 2, 1), (0, 1, 1), 12)),
    ];
    for (x, order) in cases {
        fitted.push(fit(&x, order).map_err(|e| format!("{order}: {e}"))?);
    }
    let fixture = common::fixture_series();
    let train = split(&fixture, &SplitRatios::default()).map_err(|e| e.to_string())?.train;
    fitted.push(stepwise_select(train.values(), 12, &StepwiseOptions::default()).map_err(|e| e.to_string())?.model);

    for model in &fitted {
        let fc = model.forecast(126).map_err(|e| e.to_string())?;
        let w = fc.widths();
        ensure(w.windows(2).all(|p| p[1] >= p[0]), format!("{}: width decreases", model.order))?;
    }
    let rw = fit(&common::random_walk(1000, 9), SarimaOrder::arima(0, 1, 0)).map_err(|e| e.to_string())?;
    let w = rw.forecast(126).map_err(|e| e.to_string())?.widths();
    let worst = (1..=126).map(|h| rel(w[h - 1], w[0] * (h as f64).sqrt())).fold(0.0, f64::max);
    ensure(worst < 0.01, format!("random walk deviates {worst:e} from sqrt(h)"))?;
    Ok(format!("{} models, random walk sqrt(h) deviation {worst:.1e}", fitted.len()))
}

fn gradient_check() -> Outcome {
    let worst = common::gradient_check(4, 6, 3, 1e-5, None, 1);
    ensure(worst < 1e-4, format!("max relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.2e}"))
}

fn learnability() -> Outcome {
    let data = split(&dated(common::sine(1200, 40.0)), &SplitRatios::default()).map_err(|e| e.to_string())?;
    let config = LstmConfig { units: 16, lookback: 20, dropout: 0.0, epochs: 200, seed: 1, ..Default::default() };
    let model = train(&data, &config).map_err(|e| e.to_string())?;
    let first = model.history[0].train_mse;
    let last = model.history.last().unwrap().train_mse;
    ensure(last < 1e-3 && last * 10.0 <= first, format!("train mse {first:.3e} -> {last:.3e}"))?;
    Ok(format!("train mse {first:.3e} -> {last:.3e}"))
}

/// Epoch budget for the lookback grid on the fixture, chosen to fit the time limit.
const GRID_EPOCHS: usize = 20;

fn lookback_table() -> Outcome {
    let data: DataSplit<f64> =
        split(&common::fixture_series(), &SplitRatios::default()).map_err(|e| e.to_string())?;
    let base = LstmConfig { units: 50, dropout: 0.2, epochs: GRID_EPOCHS, seed: 0, ..Default::default() };
    let reports = lookback_grid(&data, &base, &[20, 50, 100, 200]).map_err(|e| e.to_string())?;
    let val: Vec<f64> = reports.iter().map(|r| r.mse_val.unwrap_or(f64::NAN)).collect();
    let rt: Vec<f64> = reports.iter().map(|r| r.runtime_seconds).collect();
    let summary = format!(
        "val mse {:?}, runtime {:?}",
        val.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>(),
        rt.iter().map(|v| format!("{v:.1}s")).collect::<Vec<_>>()
    );
    ensure(val[1] < val[0] && val[2] < val[0], format!("lookback 50/100 not below 20: {summary}"))?;
    ensure(rt.windows(2).all(|w| w[1] >= w[0]), format!("runtime decreases: {summary}"))?;
    ensure((1e-4..=5e-2).contains(&val[1]), format!("lookback-50 val mse out of band: {summary}"))?;
    Ok(summary)
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_diff: f64 = 0.0;
    for seed in 0..10 {
        // random walks at two price levels
        for level in [1.0, 30.0] {
            let x: Vec<f64> = common::random_walk(500, seed).iter().map(|v| level * v).collect();
            for d in 0..=2 {
                for seasonal_d in 0..=1 {
                    for m in [4, 12] {
                        let spec = DifferenceSpec::new(d, seasonal_d, m);
                        let diffed = difference(&x, &spec).map_err(|e| e.to_string())?;
                        let back = integrate(&diffed, &spec, &x[..spec.lost()]).map_err(|e| e.to_string())?;
                        worst_diff = x.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(worst_diff, f64::max);
                    }
                }
            }
        }
    }
    ensure(worst_diff <= 1e-9, format!("difference/integrate error {worst_diff:e}"))?;

    let prices = dated((0..500).map(|_| rng.random_range(100.0..5000.0)).collect());
    let (scaled, scaler) = fit_rescale(&prices).map_err(|e| e.to_string())?;
    let back = inverse_rescale(scaled.values(), &scaler);
    let worst_scale = prices.values().iter().zip(&back).map(|(a, b)| rel(*b, *a)).fold(0.0, f64::max);
    ensure(worst_scale <= 1e-12, format!("rescale error {worst_scale:e}"))?;

    let sar = fit(&common::airline(0.4, 0.6, 12, 300, 6), SarimaOrder::new((1, 1, 1), (0, 1, 1), 12))
        .map_err(|e| e.to_string())?;
    let sar_back = SarimaModel::<f64>::from_json(&sar.to_json().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let (a, b) = (sar.forecast(60).unwrap(), sar_back.forecast(60).unwrap());
    ensure(a.mean == b.mean && a.lower95 == b.lower95 && a.upper95 == b.upper95, "SARIMA forecasts differ after reload")?;

    let data = split(&dated(common::sine(300, 20.0)), &SplitRatios::default()).map_err(|e| e.to_string())?;
    let config = LstmConfig { units: 8, lookback: 10, epochs: 2, ..Default::default() };
    let lstm = train(&data, &config).map_err(|e| e.to_string())?;
    let lstm_back = TrainedLstm::<f64>::from_json(&lstm.to_json().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let full = data.full();
    ensure(
        lstm.predict_future(full.values(), 60).unwrap() == lstm_back.predict_future(full.values(), 60).unwrap()
            && lstm.predict_rolling(full.values()).unwrap() == lstm_back.predict_rolling(full.values()).unwrap(),
        "LSTM predictions differ after reload",
    )?;
    Ok(format!("difference {worst_diff:.1e}, rescale {worst_scale:.1e}, forecasts bit-identical"))
}

fn run_pipeline(dir: &Path) -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_tsforecast");
    let fixture = common::fixture_path();
    let series = dir.join("series.csv");
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let steps: Vec<Vec<String>> = vec![
        vec!["ingest".into(), "--input".into(), s(&fixture), "--out".into(), s(dir)],
        vec!["auto-sarima".into(), "--input".into(), s(&series), "--out".into(), s(&dir.join("sarima"))],
        vec![
            "train-lstm".into(),
            "--input".into(),
            s(&series),
            "--out".into(),
            s(&dir.join("lstm")),
            "--seed".into(),
            "7".into(),
            "--epochs".into(),
            "5".into(),
        ],
        vec![
            "forecast".into(),
            "--model".into(),
            s(&dir.join("sarima/model.json")),
            "--input".into(),
            s(&series),
            "--out".into(),
            s(&dir.join("sarima")),
        ],
        vec![
            "forecast".into(),
            "--model".into(),
            s(&dir.join("lstm/model.json")),
            "--input".into(),
            s(&series),
            "--out".into(),
            s(&dir.join("lstm")),
        ],
        vec![
            "compare".into(),
            "--out".into(),
            s(dir),
            s(&dir.join("sarima/report.json")),
            s(&dir.join("lstm/report.json")),
        ],
    ];
    for mut args in steps {
        args.push("--reproducible".into());
        let out = Command::new(bin).args(&args).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
        }
    }
    Ok(())
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let key = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(key, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn pipeline_determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_pipeline(a.path())?;
    run_pipeline(b.path())?;
    let (fa, fb) = (files(a.path()), files(b.path()));
    ensure(fa.keys().eq(fb.keys()), format!("different file sets: {:?} vs {:?}", fa.keys(), fb.keys()))?;
    let differing: Vec<&String> = fa.iter().filter(|(k, v)| fb[*k] != **v).map(|(k, _)| k).collect();
    ensure(differing.is_empty(), format!("files differ: {differing:?}"))?;
    Ok(format!("{} files byte-identical: {:?}", fa.len(), fa.keys().collect::<Vec<_>>()))
}

/// Writes straight to stderr so the line shows even when the harness captures output.
fn report(line: std::fmt::Arguments<'_>) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let criteria = [
        Check { id: 1, name: "AIC/BIC closed form", limit: secs(1), run: information_criteria },
        Check { id: 2, name: "SARIMA parameter recovery", limit: secs(30), run: parameter_recovery },
        Check { id: 3, name: "stepwise selection sanity", limit: secs(120), run: stepwise_sanity },
        Check { id: 4, name: "order table argmin", limit: secs(1), run: table_argmin },
        Check { id: 5, name: "forecast interval monotonicity", limit: secs(10), run: interval_monotonicity },
        Check { id: 6, name: "LSTM gradient check", limit: secs(10), run: gradient_check },
        Check { id: 7, name: "LSTM learnability", limit: secs(120), run: learnability },
        Check { id: 8, name: "lookback grid shape", limit: secs(15 * 60), run: lookback_table },
        Check { id: 9, name: "round trips", limit: secs(10), run: round_trips },
        Check { id: 10, name: "end-to-end determinism", limit: secs(20 * 60), run: pipeline_determinism },
    ];

    // ACCEPTANCE_ONLY=3,9 runs a subset
    let only: Option<Vec<usize>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|v| v.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failures = Vec::new();
    for c in &criteria {
        if only.as_ref().is_some_and(|ids| !ids.contains(&c.id)) {
            report(format_args!("SKIP {:>2} {}", c.id, c.name));
            continue;
        }
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let result = match outcome {
            Ok(detail) if elapsed <= c.limit => Ok(detail),
            Ok(detail) => Err(format!("{detail}; over time limit {:?}", c.limit)),
            Err(e) => Err(e),
        };
        match &result {
            Ok(detail) => report(format_args!("PASS {:>2} {} ({:.2?}): {detail}", c.id, c.name, elapsed)),
            Err(e) => {
                report(format_args!("FAIL {:>2} {} ({:.2?}): {e}", c.id, c.name, elapsed));
                failures.push(c.id);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
