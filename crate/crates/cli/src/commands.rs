use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use serde_json::{json, Value};
use tsforecast::data::split;
use tsforecast::eval::{self, Metric, ModelReport};
use tsforecast::lstm::{self, LstmConfig};
use tsforecast::sarima::{self, Criterion, SarimaOrder, StepwiseOptions};
use tsforecast::{Lstm, Sarima, Series};

use crate::config::RunConfig;
use crate::io::{load_series, read_file, series_csv, trading_days_after, write_atomic, FileError, Mismatch};

pub struct Ctx {
    pub cfg: RunConfig,
    /// Write every wall-clock runtime as 0 so reruns are byte-identical.
    pub reproducible: bool,
}

impl Ctx {
    fn load(&self) -> anyhow::Result<Series> {
        let series = load_series(self.cfg.input()?)?;
        let series = match self.cfg.date_range {
            Some([start, end]) => series.between(Some(start), Some(end)),
            None => series,
        };
        if series.is_empty() {
            bail!(tsforecast::Error::EmptySeries);
        }
        Ok(series)
    }

    fn write(&self, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
        let path = self.cfg.out().join(name);
        write_atomic(&path, contents.as_bytes())?;
        Ok(path)
    }

    fn runtime(&self, start: Instant) -> f64 {
        if self.reproducible {
            0.0
        } else {
            start.elapsed().as_secs_f64()
        }
    }

    fn lstm_config(&self) -> anyhow::Result<LstmConfig> {
        let d = LstmConfig::default();
        let c = &self.cfg;
        let config = LstmConfig {
            units: c.units.unwrap_or(d.units),
            dropout: c.dropout.unwrap_or(d.dropout),
            lookback: c.lookback.unwrap_or(d.lookback),
            epochs: c.epochs.unwrap_or(d.epochs),
            learning_rate: c.learning_rate.unwrap_or(d.learning_rate),
            batch_size: c.batch_size.unwrap_or(d.batch_size),
            seed: c.seed.unwrap_or(d.seed),
            ..d
        };
        config.validate()?;
        Ok(config)
    }
}

fn tagged(kind: &str, json: &str) -> anyhow::Result<String> {
    let model: Value = serde_json::from_str(json)?;
    Ok(serde_json::to_string_pretty(&json!({ "kind": kind, "model": model }))? + "\n")
}

enum SavedModel {
    Sarima(Sarima),
    Lstm(Lstm),
}

fn load_model(path: &Path) -> anyhow::Result<SavedModel> {
    let bytes = read_file(path)?;
    let bad = |e: &dyn std::fmt::Display| FileError(format!("{}: {e}", path.display()));
    let value: Value = serde_json::from_slice(&bytes).map_err(|e| bad(&e))?;
    let model = value.get("model").ok_or_else(|| bad(&"missing `model`"))?.to_string();
    match value.get("kind").and_then(Value::as_str) {
        Some("sarima") => Ok(SavedModel::Sarima(Sarima::from_json(&model).map_err(|e| bad(&e))?)),
        Some("lstm") => Ok(SavedModel::Lstm(Lstm::from_json(&model).map_err(|e| bad(&e))?)),
        other => Err(bad(&format!("unknown model kind {other:?}")).into()),
    }
}

fn report_json(report: &ModelReport) -> anyhow::Result<String> {
    Ok(report.to_json()? + "\n")
}

pub fn ingest(ctx: &Ctx) -> anyhow::Result<()> {
    let series = ctx.load()?;
    let path = ctx.write("series.csv", &series_csv(&series))?;
    println!(
        "{} rows, {} to {} -> {}",
        series.len(),
        series.dates()[0],
        series.last_date().expect("non-empty"),
        path.display()
    );
    Ok(())
}

fn save_sarima(ctx: &Ctx, model: &Sarima, split: &tsforecast::Split, runtime: f64) -> anyhow::Result<ModelReport> {
    let report = eval::evaluate_sarima(model, split, runtime)?;
    ctx.write("model.json", &tagged("sarima", &model.to_json()?)?)?;
    ctx.write("report.json", &report_json(&report)?)?;
    Ok(report)
}

pub fn auto_sarima(ctx: &Ctx) -> anyhow::Result<()> {
    let series = ctx.load()?;
    let split = split(&series, &ctx.cfg.ratios()?)?;
    let criterion: Criterion = ctx.cfg.criterion.as_deref().unwrap_or("aic").parse()?;
    let opts = StepwiseOptions { criterion, ..Default::default() };
    let m = ctx.cfg.m.unwrap_or(12);

    let start = Instant::now();
    let selection = sarima::stepwise_select(split.train.values(), m, &opts)?;
    let runtime = ctx.runtime(start);

    let mut trace = String::from("order,aic,bic\n");
    for entry in &selection.trace {
        writeln!(trace, "\"{}\",{},{}", entry.order, entry.aic, entry.bic)?;
    }
    ctx.write("trace.csv", &trace)?;
    let report = save_sarima(ctx, &selection.model, &split, runtime)?;
    println!(
        "best {} by {}: aic {:.2}, bic {:.2} ({} candidates)",
        selection.model.order,
        ctx.cfg.criterion.as_deref().unwrap_or("aic"),
        report.aic.unwrap_or(f64::NAN),
        report.bic.unwrap_or(f64::NAN),
        selection.trace.len()
    );
    Ok(())
}

pub fn fit_sarima(ctx: &Ctx) -> anyhow::Result<()> {
    let order: SarimaOrder = ctx.cfg.order.as_deref().context("fit-sarima needs --order")?.parse()?;
    let series = ctx.load()?;
    let split = split(&series, &ctx.cfg.ratios()?)?;
    let start = Instant::now();
    let model = sarima::fit(split.train.values(), order)?;
    let runtime = ctx.runtime(start);
    let report = save_sarima(ctx, &model, &split, runtime)?;
    println!("{}: aic {:.2}, bic {:.2}", order, report.aic.unwrap_or(f64::NAN), report.bic.unwrap_or(f64::NAN));
    Ok(())
}

pub fn train_lstm(ctx: &Ctx) -> anyhow::Result<()> {
    let series = ctx.load()?;
    let split = split(&series, &ctx.cfg.ratios()?)?;
    let config = ctx.lstm_config()?;

    if let Some(lookbacks) = &ctx.cfg.grid_lookback {
        let mut reports = eval::lookback_grid(&split, &config, lookbacks)?;
        if ctx.reproducible {
            reports.iter_mut().for_each(|r| r.runtime_seconds = 0.0);
        }
        ctx.write("grid.csv", &eval::grid_to_csv(&reports))?;
        ctx.write("reports.json", &(serde_json::to_string_pretty(&reports)? + "\n"))?;
        for r in &reports {
            println!("{}: val mse {:.6}, {:.1}s", r.label, r.mse_val.unwrap_or(f64::NAN), r.runtime_seconds);
        }
        return Ok(());
    }

    let mut model = lstm::train(&split, &config)?;
    if ctx.reproducible {
        model.runtime_seconds = 0.0;
    }
    let report = eval::evaluate_lstm(&model, &split)?;

    let mut history = String::from("epoch,train_mse,val_mse\n");
    for rec in &model.history {
        let val = rec.val_mse.map(|v| v.to_string()).unwrap_or_default();
        writeln!(history, "{},{},{}", rec.epoch, rec.train_mse, val)?;
    }
    ctx.write("model.json", &tagged("lstm", &model.to_json()?)?)?;
    ctx.write("history.csv", &history)?;
    ctx.write("report.json", &report_json(&report)?)?;
    println!(
        "{}: train mse {:.6}, val mse {:.6}, test mse {:.6}",
        report.label,
        report.mse_train.unwrap_or(f64::NAN),
        report.mse_val.unwrap_or(f64::NAN),
        report.mse_test.unwrap_or(f64::NAN)
    );
    Ok(())
}

fn fitted_csv(series: &Series, offset: usize, predicted: &[f64]) -> String {
    let mut out = String::from("date,actual,predicted\n");
    let dates = &series.dates()[offset..];
    let actual = &series.values()[offset..];
    for ((d, a), p) in dates.iter().zip(actual).zip(predicted) {
        let _ = writeln!(out, "{d},{a},{p}");
    }
    out
}

pub fn forecast(ctx: &Ctx, model_path: &Path) -> anyhow::Result<()> {
    let model = load_model(model_path)?;
    let series = ctx.load()?;
    let horizon = ctx.cfg.horizon()?;
    let values = series.values();
    let dates = trading_days_after(series.last_date().expect("non-empty"), horizon);

    let mut out = String::new();
    let fitted = match model {
        SavedModel::Sarima(model) => {
            let history = model.history();
            let matches = values.len() >= history.len()
                && history.iter().zip(values).all(|(h, v)| (h - v).abs() <= 1e-8 * v.abs().max(1.0));
            if !matches {
                return Err(Mismatch(format!(
                    "series does not start with the {} observations the model was fitted on",
                    history.len()
                ))
                .into());
            }
            let model = model.extend(&values[history.len()..])?;
            let fc = model.forecast(horizon)?;
            out.push_str("date,mean,lower95,upper95\n");
            for (i, d) in dates.iter().enumerate() {
                writeln!(out, "{d},{},{},{}", fc.mean[i], fc.lower95[i], fc.upper95[i])?;
            }
            let lost = values.len() - model.diffed.len();
            let predicted: Vec<f64> =
                values[lost..].iter().zip(model.residuals()).map(|(v, e)| v - e).collect();
            fitted_csv(&series, lost, &predicted)
        }
        SavedModel::Lstm(model) => {
            let z = model.lookback();
            if values.len() < z {
                return Err(Mismatch(format!("model needs {z} observations, series has {}", values.len())).into());
            }
            let preds = model.predict_future(values, horizon)?;
            out.push_str("date,mean\n");
            for (d, p) in dates.iter().zip(&preds) {
                writeln!(out, "{d},{p}")?;
            }
            fitted_csv(&series, z, &model.predict_rolling(values)?)
        }
    };
    let path = ctx.write("forecast.csv", &out)?;
    ctx.write("fitted.csv", &fitted)?;
    println!("{horizon} rows, {} to {} -> {}", dates[0], dates[horizon - 1], path.display());
    Ok(())
}

fn load_reports(path: &Path) -> anyhow::Result<Vec<ModelReport>> {
    let bytes = read_file(path)?;
    let bad = |e: &dyn std::fmt::Display| FileError(format!("{}: {e}", path.display()));
    let value: Value = serde_json::from_slice(&bytes).map_err(|e| bad(&e))?;
    let items = match value {
        Value::Array(items) => items,
        other => vec![other],
    };
    items
        .into_iter()
        .map(|v| ModelReport::from_json(&v.to_string()).map_err(|e| bad(&e).into()))
        .collect()
}

pub fn compare(ctx: &Ctx, paths: &[PathBuf]) -> anyhow::Result<()> {
    if paths.is_empty() {
        bail!("compare needs at least one report file");
    }
    let mut reports = Vec::new();
    for p in paths {
        reports.extend(load_reports(p)?);
    }
    let metric: Metric = ctx.cfg.metric.as_deref().unwrap_or("mse_test").parse()?;
    let ranking = eval::compare(&reports, metric)?;
    ctx.write("league.csv", &eval::ranking_to_csv(&ranking))?;
    for r in &ranking {
        println!("{}. {} {}={}", r.rank, r.report.label, r.key, r.value);
    }
    Ok(())
}
