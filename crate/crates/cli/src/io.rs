use std::fmt;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use chrono::{Datelike, Days, NaiveDate, Weekday};
use tsforecast::data::{clean, extract_open, parse_csv, UnivariateSeries};
use tsforecast::Series;

/// An input or output file could not be read, parsed or written.
#[derive(Debug)]
pub struct FileError(pub String);

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FileError {}

/// The model does not fit the series it is asked to forecast from.
#[derive(Debug)]
pub struct Mismatch(pub String);

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

pub fn read_file(path: &Path) -> anyhow::Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| FileError(format!("cannot read {}: {e}", path.display())).into())
}

/// Writes through a temp file in the same directory, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let fail = |e: &dyn fmt::Display| FileError(format!("cannot write {}: {e}", path.display()));
    std::fs::create_dir_all(dir).map_err(|e| fail(&e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(contents).map_err(|e| fail(&e))?;
    tmp.as_file().sync_all().map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

/// Loads either an OHLCV price file (open prices are used) or a `date,value` series.
pub fn load_series(path: &Path) -> anyhow::Result<Series> {
    let bytes = read_file(path)?;
    let header = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    let header = String::from_utf8_lossy(header);
    let header = header.trim_start_matches('\u{feff}').trim();
    let parsed = if header.eq_ignore_ascii_case("date,value") {
        parse_series_csv(&bytes)
    } else {
        let symbol = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        parse_csv(&bytes, &symbol).and_then(|rows| extract_open(&rows)).map_err(anyhow::Error::from)
    };
    let series = parsed.map_err(|e| FileError(format!("{}: {e:#}", path.display())))?;
    Ok(clean(&series)?)
}

fn parse_series_csv(bytes: &[u8]) -> anyhow::Result<Series> {
    let mut reader = csv::Reader::from_reader(bytes);
    let (mut dates, mut values) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let date = record.get(0).context("missing date")?;
        let value = record.get(1).with_context(|| format!("line {line}: missing value"))?;
        dates.push(
            NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d").with_context(|| format!("line {line}: bad date `{date}`"))?,
        );
        values.push(value.trim().parse::<f64>().with_context(|| format!("line {line}: bad value `{value}`"))?);
    }
    Ok(UnivariateSeries::new(dates, values)?)
}

pub fn series_csv(series: &Series) -> String {
    let mut out = String::from("date,value\n");
    for (d, v) in series.dates().iter().zip(series.values()) {
        out.push_str(&format!("{d},{v}\n"));
    }
    out
}

/// The next `n` weekdays after `last`.
pub fn trading_days_after(last: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut day = last;
    while out.len() < n {
        day = day + Days::new(1);
        if !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(day);
        }
    }
    out
}
