//! Daily closing-price series: CSV ingestion, validation and output.
//!
//! Input files need a header row with `date` (ISO 8601) and `close` columns;
//! any other columns are ignored. Rows may arrive in any order and are sorted
//! ascending, but a date may appear only once.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use log::warn;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricePoint {
    pub date: NaiveDate,
    pub close: f64,
}

/// A validated, date-ordered sequence of daily closes.
///
/// Formulas downstream index by row position, so calendar gaps carry no
/// meaning here.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    points: Vec<PricePoint>,
}

impl PriceSeries {
    /// Builds a series from points that must already be strictly increasing
    /// in date with positive closes.
    pub fn new(points: Vec<PricePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewRows(points.len()));
        }
        for (k, p) in points.iter().enumerate() {
            if !(p.close > 0.0) || !p.close.is_finite() {
                return Err(Error::NonPositivePrice {
                    line: k + 1,
                    close: p.close,
                });
            }
        }
        for (k, w) in points.windows(2).enumerate() {
            if w[1].date <= w[0].date {
                return Err(Error::Misaligned(format!(
                    "dates not strictly increasing at position {}: {} then {}",
                    k + 1,
                    w[0].date,
                    w[1].date
                )));
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PricePoint] {
        &self.points
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.points.iter().map(|p| p.date).collect()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.close).collect()
    }

    /// Writes `date,close` rows. Closes use the shortest representation that
    /// parses back to the same `f64`, so a reload is lossless.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", "close"])?;
        for p in &self.points {
            w.write_record([p.date.format("%Y-%m-%d").to_string(), p.close.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<writer>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }
}

/// Non-fatal findings from ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadWarning {
    /// Input rows were not in ascending date order and have been sorted.
    Resorted,
}

/// Parses CSV price data from any reader.
pub fn parse_csv<R: Read>(input: R) -> Result<(PriceSeries, Vec<LoadWarning>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);

    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (date_col, close_col) = match (find("date"), find("close")) {
        (Some(d), Some(c)) => (d, c),
        _ => {
            return Err(Error::MalformedRow {
                line: 1,
                message: "header must contain `date` and `close` columns".into(),
            })
        }
    };

    let mut rows: Vec<(usize, PricePoint)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let field = |col: usize, what: &str| {
            record.get(col).filter(|s| !s.is_empty()).ok_or_else(|| Error::MalformedRow {
                line,
                message: format!("missing {what}"),
            })
        };
        let date_s = field(date_col, "date")?;
        let close_s = field(close_col, "close")?;
        let date = NaiveDate::parse_from_str(date_s, "%Y-%m-%d").map_err(|e| Error::MalformedRow {
            line,
            message: format!("bad date {date_s:?}: {e}"),
        })?;
        let close: f64 = close_s.parse().map_err(|_| Error::MalformedRow {
            line,
            message: format!("bad close {close_s:?}"),
        })?;
        if !close.is_finite() {
            return Err(Error::MalformedRow {
                line,
                message: format!("close is not finite: {close_s:?}"),
            });
        }
        if close <= 0.0 {
            return Err(Error::NonPositivePrice { line, close });
        }
        rows.push((line, PricePoint { date, close }));
    }

    if rows.len() < 2 {
        return Err(Error::TooFewRows(rows.len()));
    }

    let mut warnings = Vec::new();
    if rows.windows(2).any(|w| w[1].1.date < w[0].1.date) {
        warnings.push(LoadWarning::Resorted);
        rows.sort_by_key(|(_, p)| p.date);
    }
    if let Some(w) = rows.windows(2).find(|w| w[1].1.date == w[0].1.date) {
        return Err(Error::DuplicateDate {
            line: w[0].0.max(w[1].0),
            date: w[0].1.date.to_string(),
        });
    }

    let series = PriceSeries::new(rows.into_iter().map(|(_, p)| p).collect())?;
    Ok((series, warnings))
}

/// Loads and validates a price CSV, logging any ingestion warnings.
pub fn load_csv(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let (series, warnings) = parse_csv(file)?;
    for w in warnings {
        match w {
            LoadWarning::Resorted => {
                warn!("{}: rows were out of date order and have been sorted", path.display())
            }
        }
    }
    Ok(series)
}
