use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use tsforecast::data::SplitRatios;

/// Flat JSON run configuration. Every field is optional; command-line flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub date_range: Option<[NaiveDate; 2]>,
    pub split_ratios: Option<[f64; 3]>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,

    pub m: Option<usize>,
    pub criterion: Option<String>,
    pub order: Option<String>,

    pub units: Option<usize>,
    pub dropout: Option<f64>,
    pub lookback: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub grid_lookback: Option<Vec<usize>>,

    pub metric: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn ratios(&self) -> anyhow::Result<SplitRatios> {
        match self.split_ratios {
            None => Ok(SplitRatios::default()),
            Some([a, b, c]) => Ok(SplitRatios::from_weights(a, b, c)?),
        }
    }

    pub fn input(&self) -> anyhow::Result<&Path> {
        match &self.input_path {
            Some(p) => Ok(p),
            None => bail!("no input file given (use --input or input_path in the config)"),
        }
    }

    pub fn out(&self) -> &Path {
        self.output_dir.as_deref().unwrap_or(Path::new("."))
    }

    pub fn horizon(&self) -> anyhow::Result<usize> {
        let h = self.horizon.unwrap_or(126);
        if h == 0 {
            bail!("horizon must be at least 1");
        }
        Ok(h)
    }
}

pub fn parse_range(s: &str) -> anyhow::Result<[NaiveDate; 2]> {
    let (a, b) = s.split_once(':').context("range must look like START:END")?;
    let date = |t: &str| NaiveDate::parse_from_str(t.trim(), "%Y-%m-%d").with_context(|| format!("bad date `{t}`"));
    let (start, end) = (date(a)?, date(b)?);
    if start > end {
        bail!("range start {start} is after end {end}");
    }
    Ok([start, end])
}

pub fn parse_ratios(s: &str) -> anyhow::Result<[f64; 3]> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad ratio `{t}`")))
        .collect::<anyhow::Result<_>>()?;
    match parts.as_slice() {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => bail!("expected three comma-separated ratios, got `{s}`"),
    }
}
