//! CSV and JSON output for every result type.
//!
//! Numbers are written with a fixed number of decimals and JSON object keys
//! are sorted, so identical inputs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::regime::{RegimeSeries, RegimeSummary};
use crate::strategy::{BacktestResult, SweepRow};
use crate::transforms::CcrSeries;

/// Decimals for prices, lambdas, P&L and statistics.
pub const DECIMALS: usize = 6;
/// Decimals for log-returns, which are small.
pub const RETURN_DECIMALS: usize = 10;

/// Formats with `decimals` places; `inf`, `-inf` and `nan` for non-finite
/// values, and never `-0.000000`.
pub fn fixed(x: f64, decimals: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

/// JSON number with [`DECIMALS`] places, or a string for non-finite values.
pub fn fixed_json(x: f64) -> Value {
    let s = fixed(x, DECIMALS);
    if x.is_finite() {
        Value::Number(Number::from_str(&s).expect("fixed output is a valid JSON number"))
    } else {
        Value::String(s)
    }
}

fn opt_json(x: Option<f64>) -> Value {
    x.map_or(Value::Null, fixed_json)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| Error::io("<writer>", e))?;
        Ok(())
    }
}

/// Something with a tabular (CSV) and a structured (JSON) rendering.
pub trait Report {
    fn table(&self) -> Table;
    fn json(&self) -> Value;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

pub fn render(record: &dyn Report, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => record.table().write_csv(out),
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &record.json())?;
            out.write_all(b"\n").map_err(|e| Error::io("<writer>", e))
        }
    }
}

pub fn write_report(record: &dyn Report, format: Format, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    render(record, format, &mut out)?;
    out.flush().map_err(|e| Error::io(path, e))
}

impl Report for Table {
    fn table(&self) -> Table {
        self.clone()
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self
                        .header
                        .iter()
                        .cloned()
                        .zip(r.iter().map(|v| Value::String(v.clone())))
                        .collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

impl Report for CcrSeries {
    fn table(&self) -> Table {
        let mut t = Table::new(&["date", "ccr"]);
        for (d, v) in self.dates.iter().zip(&self.values) {
            t.push(vec![d.to_string(), fixed(*v, RETURN_DECIMALS)]);
        }
        t
    }

    fn json(&self) -> Value {
        let rows = self
            .dates
            .iter()
            .zip(&self.values)
            .map(|(d, v)| {
                let n = Number::from_str(&fixed(*v, RETURN_DECIMALS)).expect("finite return");
                json!({ "date": d.to_string(), "ccr": Value::Number(n) })
            })
            .collect();
        Value::Array(rows)
    }
}

impl Report for RegimeSeries {
    fn table(&self) -> Table {
        let mut t = Table::new(&["date", "lambda", "regime"]);
        for p in &self.points {
            t.push(vec![
                p.date.to_string(),
                p.lambda.map(|l| fixed(l, DECIMALS)).unwrap_or_default(),
                p.regime.as_str().to_string(),
            ]);
        }
        t
    }

    fn json(&self) -> Value {
        let days = self
            .points
            .iter()
            .map(|p| json!({ "date": p.date.to_string(), "lambda": opt_json(p.lambda), "regime": p.regime.as_str() }))
            .collect::<Vec<_>>();
        json!({
            "thresholds": {
                "stationary": fixed_json(self.thresholds.stationary),
                "non_stationary": fixed_json(self.thresholds.non_stationary),
            },
            "days": days,
        })
    }
}

impl Report for RegimeSummary {
    fn table(&self) -> Table {
        let j = self.json();
        let obj = j.as_object().expect("summary is an object");
        let mut t = Table::new(&["key", "value"]);
        for (k, v) in obj {
            let v = match v {
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            t.push(vec![k.clone(), v]);
        }
        t
    }

    fn json(&self) -> Value {
        json!({
            "days": self.days,
            "stationary": self.stationary,
            "intermediate": self.intermediate,
            "non_stationary": self.non_stationary,
            "unclassifiable": self.unclassifiable,
            "frac_stationary": fixed_json(self.frac_stationary),
            "frac_intermediate": fixed_json(self.frac_intermediate),
            "frac_non_stationary": fixed_json(self.frac_non_stationary),
            "kurtosis_all": opt_json(self.kurtosis_all),
            "kurtosis_stationary": opt_json(self.kurtosis_stationary),
        })
    }
}

fn sign(p: crate::strategy::Position) -> &'static str {
    match p {
        crate::strategy::Position::Long => "1",
        crate::strategy::Position::Flat => "0",
        crate::strategy::Position::Short => "-1",
    }
}

/// CSV is the daily equity curve, JSON the headline metrics and trade list.
impl Report for BacktestResult {
    fn table(&self) -> Table {
        let mut t = Table::new(&["date", "position", "equity", "realized"]);
        for e in &self.equity {
            t.push(vec![
                e.date.to_string(),
                sign(e.position).to_string(),
                fixed(e.equity, DECIMALS),
                fixed(e.realized, DECIMALS),
            ]);
        }
        t
    }

    fn json(&self) -> Value {
        let m = &self.metrics;
        let trades = self
            .trades
            .iter()
            .map(|t| {
                json!({
                    "direction": t.direction.as_str(),
                    "entry_date": t.entry_date.to_string(),
                    "exit_date": t.exit_date.to_string(),
                    "entry_price": fixed_json(t.entry_price),
                    "exit_price": fixed_json(t.exit_price),
                    "pnl": fixed_json(t.pnl),
                })
            })
            .collect::<Vec<_>>();
        let open = match &self.open {
            Some(o) => json!({
                "direction": o.direction.as_str(),
                "entry_date": self.equity[o.entry_day].date.to_string(),
                "entry_price": fixed_json(o.entry_price),
                "unrealized": fixed_json(o.unrealized),
            }),
            None => Value::Null,
        };
        json!({
            "n_trade": m.n_trade,
            "profit": fixed_json(m.profit),
            "profit_factor": fixed_json(m.profit_factor),
            "max_drawdown": fixed_json(m.max_drawdown),
            "max_drawdown_realized": fixed_json(m.max_drawdown_realized),
            "gross_profit": fixed_json(m.gross_profit),
            "gross_loss": fixed_json(m.gross_loss),
            "params": {
                "n_ma": self.params.n_ma,
                "n_psy": self.params.n_psy,
                "mode": self.mode.to_string(),
            },
            "short_history_days": self.short_history_days,
            "open_position": open,
            "trades": trades,
        })
    }
}

/// Sweep results in their ranked order.
pub struct SweepTable<'a>(pub &'a [SweepRow]);

impl Report for SweepTable<'_> {
    fn table(&self) -> Table {
        let mut t = Table::new(&["n_ma", "n_psy", "n_trade", "profit", "pf", "mdd"]);
        for r in self.0 {
            let m = &r.metrics;
            t.push(vec![
                r.params.n_ma.to_string(),
                r.params.n_psy.to_string(),
                m.n_trade.to_string(),
                fixed(m.profit, DECIMALS),
                fixed(m.profit_factor, DECIMALS),
                fixed(m.max_drawdown, DECIMALS),
            ]);
        }
        t
    }

    fn json(&self) -> Value {
        Value::Array(
            self.0
                .iter()
                .map(|r| {
                    json!({
                        "n_ma": r.params.n_ma,
                        "n_psy": r.params.n_psy,
                        "n_trade": r.metrics.n_trade,
                        "profit": fixed_json(r.metrics.profit),
                        "pf": fixed_json(r.metrics.profit_factor),
                        "mdd": fixed_json(r.metrics.max_drawdown),
                    })
                })
                .collect(),
        )
    }
}
