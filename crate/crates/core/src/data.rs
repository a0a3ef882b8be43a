//! OHLCV ingestion, open-price extraction, cleaning and chronological splits.

use std::ops::Range;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const CSV_HEADER: [&str; 7] = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhlcvRow {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub adj_close: f64,
    pub volume: u64,
}

/// Daily bars for one symbol, sorted by strictly increasing date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OhlcvSeries {
    pub symbol: String,
    rows: Vec<OhlcvRow>,
}

impl OhlcvSeries {
    pub fn rows(&self) -> &[OhlcvRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// A dated real-valued series with strictly increasing dates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct UnivariateSeries<T> {
    dates: Vec<NaiveDate>,
    values: Vec<T>,
}

impl<T: Scalar> UnivariateSeries<T> {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<T>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "dates not strictly increasing at {}",
                w[1]
            )));
        }
        Ok(Self { dates, values })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.dates.last().copied()
    }

    pub fn slice(&self, range: Range<usize>) -> Self {
        Self {
            dates: self.dates[range.clone()].to_vec(),
            values: self.values[range].to_vec(),
        }
    }

    /// Observations with `start <= date <= end`; either bound may be open.
    pub fn between(&self, start: Option<NaiveDate>, end: Option<NaiveDate>) -> Self {
        let lo = start.map_or(0, |s| self.dates.partition_point(|d| *d < s));
        let hi = end.map_or(self.len(), |e| self.dates.partition_point(|d| *d <= e));
        self.slice(lo..hi.max(lo))
    }

    /// Converts the values to another scalar type.
    pub fn cast<U: Scalar>(&self) -> UnivariateSeries<U> {
        UnivariateSeries {
            dates: self.dates.clone(),
            values: self
                .values
                .iter()
                .map(|v| U::from_f64(v.as_f64()).unwrap_or_else(U::nan))
                .collect(),
        }
    }

    /// Appends `other`, whose first date must follow this series' last date.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut dates = self.dates.clone();
        dates.extend_from_slice(&other.dates);
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Self::new(dates, values)
    }
}

/// Parses a Yahoo-style daily CSV (`Date,Open,High,Low,Close,Adj Close,Volume`).
///
/// Rows are returned sorted by date. Line numbers in errors are 1-based and
/// count the header as line 1.
pub fn parse_csv(bytes: &[u8], symbol: &str) -> Result<OhlcvSeries> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(Error::Format(e.to_string())),
        None => return Err(Error::Format("missing header row".into())),
    };
    if header.len() != CSV_HEADER.len() || header.iter().zip(CSV_HEADER).any(|(a, b)| a != b) {
        return Err(Error::Format(format!(
            "expected header `{}`, found `{}`",
            CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Row { line, message: e.to_string() }
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        rows.push(parse_row(&record, line)?);
    }

    rows.sort_by_key(|r| r.date);
    if let Some(w) = rows.windows(2).find(|w| w[0].date == w[1].date) {
        return Err(Error::DuplicateDate(w[0].date));
    }
    Ok(OhlcvSeries { symbol: symbol.to_string(), rows })
}

fn parse_row(record: &csv::StringRecord, line: usize) -> Result<OhlcvRow> {
    let row_err = |message: String| Error::Row { line, message };
    if record.len() != CSV_HEADER.len() {
        return Err(row_err(format!("expected 7 fields, found {}", record.len())));
    }
    let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
        .map_err(|e| row_err(format!("bad date `{}`: {e}", &record[0])))?;
    let price = |idx: usize| -> Result<f64> {
        let field = &record[idx];
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
            Ok(_) => Err(row_err(format!("{} must be positive, got `{field}`", CSV_HEADER[idx]))),
            Err(_) => Err(row_err(format!("{} is not a number: `{field}`", CSV_HEADER[idx]))),
        }
    };
    let (open, high, low, close, adj_close) = (price(1)?, price(2)?, price(3)?, price(4)?, price(5)?);
    if low > high {
        return Err(row_err(format!("low {low} exceeds high {high}")));
    }
    let volume = match record[6].parse::<u64>() {
        Ok(v) => v,
        Err(_) => match record[6].parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => v.round() as u64,
            _ => return Err(row_err(format!("bad volume `{}`", &record[6]))),
        },
    };
    Ok(OhlcvRow { date, open, high, low, close, adj_close, volume })
}

/// Projects the open price of every row.
pub fn extract_open(series: &OhlcvSeries) -> Result<UnivariateSeries<f64>> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(UnivariateSeries {
        dates: series.rows.iter().map(|r| r.date).collect(),
        values: series.rows.iter().map(|r| r.open).collect(),
    })
}

/// Drops non-finite and non-positive observations.
pub fn clean<T: Scalar>(series: &UnivariateSeries<T>) -> Result<UnivariateSeries<T>> {
    let (dates, values): (Vec<_>, Vec<_>) = series
        .dates
        .iter()
        .zip(&series.values)
        .filter(|(_, v)| v.is_finite() && **v > T::zero())
        .map(|(d, v)| (*d, *v))
        .unzip();
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(UnivariateSeries { dates, values })
}

/// Train/validation/test proportions.
///
/// The test block takes `floor(test * N)` trailing points; the remainder is
/// split `train : validation`, the train block taking the floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitRatios {
    /// Normalizes arbitrary positive weights, e.g. `(7, 2, 1)`.
    pub fn from_weights(train: f64, validation: f64, test: f64) -> Result<Self> {
        let total = train + validation + test;
        let ratios = Self { train: train / total, validation: validation / total, test: test / total };
        ratios.validate()?;
        Ok(ratios)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidArgument(format!("split ratios must be positive: {parts:?}")));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("split ratios must sum to 1: {parts:?}")));
        }
        Ok(())
    }
}

impl Default for SplitRatios {
    /// 10% test, remainder 8:2, i.e. roughly 7:2:1 overall.
    fn default() -> Self {
        Self { train: 0.72, validation: 0.18, test: 0.10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DataSplit<T> {
    pub train: UnivariateSeries<T>,
    pub validation: UnivariateSeries<T>,
    pub test: UnivariateSeries<T>,
}

impl<T: Scalar> DataSplit<T> {
    /// Train followed by validation.
    pub fn train_and_validation(&self) -> UnivariateSeries<T> {
        self.train.concat(&self.validation).expect("split blocks are chronological")
    }

    pub fn full(&self) -> UnivariateSeries<T> {
        self.train_and_validation()
            .concat(&self.test)
            .expect("split blocks are chronological")
    }
}

pub const MIN_SPLIT_LEN: usize = 10;

/// Block sizes `(train, validation, test)` for a series of length `n`.
pub fn split_sizes(n: usize, ratios: &SplitRatios) -> Result<(usize, usize, usize)> {
    ratios.validate()?;
    if n < MIN_SPLIT_LEN {
        return Err(Error::TooShort { needed: MIN_SPLIT_LEN, got: n });
    }
    // the epsilon keeps exact products like 0.1 * 10 from flooring to 0
    let floor = |x: f64| (x + 1e-9).floor() as usize;
    let test = floor(ratios.test * n as f64);
    let rest = n - test;
    let train = floor(ratios.train / (ratios.train + ratios.validation) * rest as f64);
    Ok((train, rest - train, test))
}

/// Chronological split, no shuffling.
pub fn split<T: Scalar>(series: &UnivariateSeries<T>, ratios: &SplitRatios) -> Result<DataSplit<T>> {
    let (train, validation, _) = split_sizes(series.len(), ratios)?;
    Ok(DataSplit {
        train: series.slice(0..train),
        validation: series.slice(train..train + validation),
        test: series.slice(train + validation..series.len()),
    })
}
