//! Model reports, the lookback grid and metric-based ranking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::DataSplit;
use crate::error::{Error, Result};
use crate::lstm::{self, mse, windows_after, LstmConfig, TrainedLstm};
use crate::sarima::{AicConvention, SarimaModel};
use crate::scalar::Scalar;

pub const UNIT_PRICE: &str = "price";
pub const UNIT_SCALED: &str = "scaled";

/// One row of a model comparison table. Free-form hyperparameters and
/// auxiliary metrics live in `params`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub label: String,
    pub aic: Option<f64>,
    pub bic: Option<f64>,
    pub mse_train: Option<f64>,
    pub mse_val: Option<f64>,
    pub mse_test: Option<f64>,
    pub runtime_seconds: f64,
    pub params: BTreeMap<String, String>,
}

impl ModelReport {
    pub fn validate(&self) -> Result<()> {
        let metrics = [self.aic, self.bic, self.mse_train, self.mse_val, self.mse_test];
        if metrics.iter().all(Option::is_none) {
            return Err(Error::InvalidArgument(format!("report `{}` has no metrics", self.label)));
        }
        for m in [self.mse_train, self.mse_val, self.mse_test].into_iter().flatten() {
            if !(m >= 0.0) {
                return Err(Error::InvalidArgument(format!("report `{}` has negative MSE {m}", self.label)));
            }
        }
        Ok(())
    }

    pub fn mse_unit(&self) -> &str {
        self.params.get("mse_unit").map_or("unknown", String::as_str)
    }

    fn param_f64(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(|v| v.parse().ok())
    }

    pub fn metric(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Aic => self.aic,
            Metric::Bic => self.bic,
            Metric::MseTrain => self.mse_train,
            Metric::MseVal => self.mse_val,
            Metric::MseTest => self.mse_test,
            Metric::Runtime => Some(self.runtime_seconds),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(s)?;
        report.validate()?;
        Ok(report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Aic,
    Bic,
    MseTrain,
    MseVal,
    MseTest,
    Runtime,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Aic => "aic",
            Metric::Bic => "bic",
            Metric::MseTrain => "mse_train",
            Metric::MseVal => "mse_val",
            Metric::MseTest => "mse_test",
            Metric::Runtime => "runtime_seconds",
        }
    }

    fn is_mse(&self) -> bool {
        matches!(self, Metric::MseTrain | Metric::MseVal | Metric::MseTest)
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "aic" => Metric::Aic,
            "bic" => Metric::Bic,
            "mse_train" => Metric::MseTrain,
            "mse_val" => Metric::MseVal,
            "mse_test" => Metric::MseTest,
            "runtime" | "runtime_seconds" => Metric::Runtime,
            other => return Err(Error::InvalidArgument(format!("unknown metric `{other}`"))),
        })
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn mean_square<T: Scalar>(errors: &[T]) -> Option<f64> {
    if errors.is_empty() {
        return None;
    }
    Some(errors.iter().map(|e| e.as_f64() * e.as_f64()).sum::<f64>() / errors.len() as f64)
}

/// AIC/BIC from the fitted likelihood and one-step-ahead MSEs in price units.
///
/// Train MSE uses the in-sample residuals; validation and test MSE roll the
/// fitted model forward over the held-out blocks, each prediction using the
/// true values before it.
pub fn evaluate_sarima<T: Scalar>(
    model: &SarimaModel<T>,
    split: &DataSplit<T>,
    runtime_seconds: f64,
) -> Result<ModelReport> {
    let val = split.validation.values();
    let test = split.test.values();
    let mut held_out = val.to_vec();
    held_out.extend_from_slice(test);
    let errors = if held_out.is_empty() { Vec::new() } else { model.one_step_errors(&held_out)? };
    let (val_err, test_err) = errors.split_at(val.len());

    let mse_train = mean_square(&model.residuals());
    let mse_val = mean_square(val_err);
    let mse_test = mean_square(test_err);

    let mut params = BTreeMap::new();
    params.insert("family".into(), "sarima".into());
    params.insert("order".into(), model.order.to_string());
    params.insert("mse_unit".into(), UNIT_PRICE.into());
    params.insert("aic_normalized".into(), fmt_f64(model.aic(AicConvention::Normalized).as_f64()));
    params.insert("loglik".into(), fmt_f64(model.loglik.as_f64()));
    params.insert("sigma2".into(), fmt_f64(model.sigma2.as_f64()));
    params.insert("n_obs".into(), model.n_obs.to_string());
    params.insert("k".into(), model.k.to_string());
    for (key, v) in [("mse_train_price", mse_train), ("mse_val_price", mse_val), ("mse_test_price", mse_test)] {
        if let Some(v) = v {
            params.insert(key.into(), fmt_f64(v));
        }
    }

    let report = ModelReport {
        label: format!("SARIMA{}", model.order),
        aic: Some(model.aic(AicConvention::Standard).as_f64()),
        bic: Some(model.bic().as_f64()),
        mse_train,
        mse_val,
        mse_test,
        runtime_seconds,
        params,
    };
    report.validate()?;
    Ok(report)
}

pub fn lstm_label(config: &LstmConfig) -> String {
    format!("LSTM(dropout={}, units={}, lookback={})", config.dropout, config.units, config.lookback)
}

/// Train/validation MSE from the last epoch; test MSE from rolling
/// predictions over the test block, in scaled units. Price-unit MSEs go to `params`.
pub fn evaluate_lstm<T: Scalar>(model: &TrainedLstm<T>, split: &DataSplit<T>) -> Result<ModelReport> {
    let z = model.lookback();
    let last = model
        .history
        .last()
        .ok_or_else(|| Error::InvalidArgument("model has no training history".into()))?;
    let scaler = &model.scaler;

    let mut context = split.train.values().to_vec();
    let mut block_mse = |block: &[T]| -> Result<Option<(f64, f64)>> {
        let windows = windows_after(&scaler.transform(&context), &scaler.transform(block), z)?;
        context.extend_from_slice(block);
        let Some(windows) = windows else { return Ok(None) };
        let preds: Vec<T> = windows.inputs.iter().map(|w| lstm::predict_window(&model.weights, w)).collect();
        let scaled = mse(&preds, &windows.targets)?.as_f64();
        let price = mse(&scaler.inverse(&preds), block)?.as_f64();
        Ok(Some((scaled, price)))
    };
    let val = block_mse(split.validation.values())?;
    let test = block_mse(split.test.values())?;
    let train_price = {
        let preds = model.predict_rolling(split.train.values())?;
        mse(&preds, &split.train.values()[z..])?.as_f64()
    };

    let c = &model.config;
    let mut params = BTreeMap::new();
    params.insert("family".into(), "lstm".into());
    params.insert("dropout".into(), c.dropout.to_string());
    params.insert("units".into(), c.units.to_string());
    params.insert("lookback".into(), c.lookback.to_string());
    params.insert("epochs".into(), c.epochs.to_string());
    params.insert("learning_rate".into(), c.learning_rate.to_string());
    params.insert("batch_size".into(), c.batch_size.to_string());
    params.insert("seed".into(), c.seed.to_string());
    params.insert("mse_unit".into(), UNIT_SCALED.into());
    params.insert("mse_train_price".into(), fmt_f64(train_price));
    if let Some((_, p)) = val {
        params.insert("mse_val_price".into(), fmt_f64(p));
    }
    if let Some((_, p)) = test {
        params.insert("mse_test_price".into(), fmt_f64(p));
    }

    let report = ModelReport {
        label: lstm_label(c),
        aic: None,
        bic: None,
        mse_train: Some(last.train_mse.as_f64()),
        mse_val: last.val_mse.map(|v| v.as_f64()),
        mse_test: test.map(|(s, _)| s),
        runtime_seconds: model.runtime_seconds,
        params,
    };
    report.validate()?;
    Ok(report)
}

/// Trains and evaluates one model per lookback with the same seed and schedule.
pub fn lookback_grid<T: Scalar>(
    split: &DataSplit<T>,
    base: &LstmConfig,
    lookbacks: &[usize],
) -> Result<Vec<ModelReport>> {
    if lookbacks.is_empty() {
        return Err(Error::InvalidArgument("lookback grid is empty".into()));
    }
    if let Some(&z) = lookbacks.iter().find(|&&z| z >= split.train.len()) {
        return Err(Error::TooShort { needed: z + 1, got: split.train.len() });
    }
    lookbacks
        .iter()
        .map(|&lookback| {
            let config = LstmConfig { lookback, ..*base };
            let model = lstm::train(split, &config)?;
            evaluate_lstm(&model, split)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranked {
    pub rank: usize,
    /// Value actually ranked on.
    pub value: f64,
    /// `metric` or, for mixed-unit MSE, the `<metric>_price` param.
    pub key: String,
    pub report: ModelReport,
}

/// Stable ascending ranking by `metric`, ties broken by label.
///
/// MSE metrics are only compared within one unit. When units differ every
/// report must carry the `<metric>_price` param, which is ranked instead.
pub fn compare(reports: &[ModelReport], metric: Metric) -> Result<Vec<Ranked>> {
    let units: BTreeSet<&str> = reports.iter().map(ModelReport::mse_unit).collect();
    let price_key = format!("{}_price", metric.name());
    let use_price = metric.is_mse() && units.len() > 1;

    let mut rows = Vec::with_capacity(reports.len());
    for report in reports {
        let value = if use_price {
            report
                .param_f64(&price_key)
                .ok_or_else(|| Error::MixedUnits(units.iter().map(|u| u.to_string()).collect()))?
        } else {
            report.metric(metric).ok_or_else(|| Error::MetricMissing {
                label: report.label.clone(),
                metric: metric.name().into(),
            })?
        };
        rows.push((value, report));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.label.cmp(&b.1.label)));
    let key = if use_price { price_key } else { metric.name().to_string() };
    Ok(rows
        .into_iter()
        .enumerate()
        .map(|(i, (value, report))| Ranked { rank: i + 1, value, key: key.clone(), report: report.clone() })
        .collect())
}

pub const REPORT_CSV_HEADER: &str = "label,aic,bic,mse_train,mse_val,mse_test,runtime_seconds";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn report_csv_row(r: &ModelReport) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        csv_field(&r.label),
        opt(r.aic),
        opt(r.bic),
        opt(r.mse_train),
        opt(r.mse_val),
        opt(r.mse_test),
        fmt_f64(r.runtime_seconds)
    )
}

/// Reports as CSV with the fixed column set.
pub fn reports_to_csv(reports: &[ModelReport]) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{}", report_csv_row(r));
    }
    out
}

/// Lookback-grid table: drop-out, units, lookback, train/validation MSE, runtime.
pub fn grid_to_csv(reports: &[ModelReport]) -> String {
    let mut out = String::from("dropout,units,lookback,mse_train,mse_val,runtime_seconds\n");
    for r in reports {
        let p = |k: &str| r.params.get(k).cloned().unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p("dropout"),
            p("units"),
            p("lookback"),
            opt(r.mse_train),
            opt(r.mse_val),
            fmt_f64(r.runtime_seconds)
        );
    }
    out
}

/// League table: rank and ranked value followed by the report columns.
pub fn ranking_to_csv(ranking: &[Ranked]) -> String {
    let mut out = format!("rank,key,value,{REPORT_CSV_HEADER}\n");
    for r in ranking {
        let _ = writeln!(out, "{},{},{},{}", r.rank, r.key, fmt_f64(r.value), report_csv_row(&r.report));
    }
    out
}
