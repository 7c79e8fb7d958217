//! Sliding-window stationarity parameter and three-way regime labels.
//!
//! Day `i` of the log-return series is scored from the `N + 1` returns
//! ending at `i`: the fraction of the 171 transform pairs whose relaxed
//! Test(S) passes. Labels live on price positions, so the score for return
//! index `i` belongs to price day `i + 1`, the day whose close completes it.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market_data::PriceSeries;
use crate::km2o::{test_s, StationarityVerdict, TestSConfig};
use crate::transforms::{window_pairs, CcrSeries, DEFAULT_WINDOW, PAIR_COUNT};

/// A transform pair's indices with its Test(S) verdict.
pub type PairVerdict = ((usize, usize), StationarityVerdict);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    pub window: usize,
    pub test: TestSConfig,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            test: TestSConfig::default(),
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        // the shortest pair has window - 3 points and needs order >= 1
        if self.window < 8 {
            return Err(Error::invalid("window", format!("must be >= 8, got {}", self.window)));
        }
        self.test.validate()
    }
}

/// Per-pair verdicts for the window ending at return index `anchor`, in
/// pair-id order. `None` for a constant (degenerate) window.
pub fn window_verdicts(
    ccr: &[f64],
    anchor: usize,
    cfg: &ClassifierConfig,
) -> Result<Option<Vec<PairVerdict>>> {
    let pairs = match window_pairs(ccr, anchor, cfg.window) {
        Ok(p) => p,
        Err(Error::DegenerateWindow) => return Ok(None),
        Err(e) => return Err(e),
    };
    let verdicts = pairs
        .par_iter()
        .map(|p| test_s(p, &cfg.test).map(|v| (p.id, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(verdicts))
}

/// Number of passing pairs for one window, `None` if degenerate.
pub fn window_pass_count(ccr: &[f64], anchor: usize, cfg: &ClassifierConfig) -> Result<Option<usize>> {
    Ok(window_verdicts(ccr, anchor, cfg)?.map(|v| v.iter().filter(|(_, v)| v.passed).count()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPoint {
    /// Position in the price series.
    pub day: usize,
    pub date: NaiveDate,
    /// Passing pairs out of 171; `None` for a degenerate window.
    pub passed: Option<usize>,
}

impl LambdaPoint {
    pub fn lambda(&self) -> Option<f64> {
        self.passed.map(|p| p as f64 / PAIR_COUNT as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSeries {
    pub points: Vec<LambdaPoint>,
    pub alpha: f64,
}

impl LambdaSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lambdas(&self) -> Vec<Option<f64>> {
        self.points.iter().map(LambdaPoint::lambda).collect()
    }

    /// Fraction of non-degenerate days with every pair passing.
    pub fn full_pass_rate(&self) -> f64 {
        let valid: Vec<usize> = self.points.iter().filter_map(|p| p.passed).collect();
        if valid.is_empty() {
            return 0.0;
        }
        valid.iter().filter(|&&p| p == PAIR_COUNT).count() as f64 / valid.len() as f64
    }
}

/// Stationarity parameter for every return index from `N` to the end.
pub fn lambda_series(ccr: &CcrSeries, cfg: &ClassifierConfig) -> Result<LambdaSeries> {
    cfg.validate()?;
    if ccr.len() <= cfg.window {
        return Err(Error::InsufficientHistory {
            needed: cfg.window + 1,
            index: ccr.len(),
        });
    }
    let points = (cfg.window..ccr.len())
        .into_par_iter()
        .map(|anchor| {
            Ok(LambdaPoint {
                day: anchor + 1,
                date: ccr.dates[anchor],
                passed: window_pass_count(&ccr.values, anchor, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LambdaSeries {
        points,
        alpha: cfg.test.alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    Stationary,
    Intermediate,
    NonStationary,
    Unclassifiable,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Stationary => "stationary",
            Regime::Intermediate => "intermediate",
            Regime::NonStationary => "non-stationary",
            Regime::Unclassifiable => "unclassifiable",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "stationary" => Ok(Regime::Stationary),
            "intermediate" => Ok(Regime::Intermediate),
            "non-stationary" => Ok(Regime::NonStationary),
            "unclassifiable" | "" => Ok(Regime::Unclassifiable),
            other => Err(format!("unknown regime `{other}`")),
        }
    }
}

/// `stationary` at or above `stationary`, `non-stationary` below
/// `non_stationary`, `intermediate` in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub stationary: f64,
    pub non_stationary: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            stationary: 165.5 / 171.0,
            non_stationary: 100.5 / 171.0,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.non_stationary < self.stationary && self.stationary <= 1.0) {
            return Err(Error::invalid(
                "thresholds",
                format!(
                    "need lambda2 < lambda1 <= 1, got lambda1 = {}, lambda2 = {}",
                    self.stationary, self.non_stationary
                ),
            ));
        }
        Ok(())
    }

    pub fn label(&self, lambda: Option<f64>) -> Regime {
        match lambda {
            None => Regime::Unclassifiable,
            Some(l) if l >= self.stationary => Regime::Stationary,
            Some(l) if l >= self.non_stationary => Regime::Intermediate,
            Some(_) => Regime::NonStationary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimePoint {
    pub day: usize,
    pub date: NaiveDate,
    pub lambda: Option<f64>,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSeries {
    pub points: Vec<RegimePoint>,
    pub thresholds: Thresholds,
}

impl RegimeSeries {
    /// One label per price day; days before the first scored window are
    /// unclassifiable.
    pub fn for_prices(&self, n_prices: usize) -> Vec<Regime> {
        let mut out = vec![Regime::Unclassifiable; n_prices];
        for p in &self.points {
            if p.day < n_prices {
                out[p.day] = p.regime;
            }
        }
        out
    }
}

pub fn classify(lambdas: &LambdaSeries, thresholds: Thresholds) -> Result<RegimeSeries> {
    thresholds.validate()?;
    let points = lambdas
        .points
        .iter()
        .map(|p| {
            let lambda = p.lambda();
            RegimePoint {
                day: p.day,
                date: p.date,
                lambda,
                regime: thresholds.label(lambda),
            }
        })
        .collect();
    Ok(RegimeSeries { points, thresholds })
}

/// Reads `date,regime` labels from CSV; other columns, such as the `lambda`
/// column of a classification file, are ignored.
pub fn parse_regimes<R: Read>(input: R) -> Result<Vec<(NaiveDate, Regime)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(date_col), Some(regime_col)) = (find("date"), find("regime")) else {
        return Err(Error::MalformedRow {
            line: 1,
            message: "header must contain `date` and `regime` columns".into(),
        });
    };
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let bad = |message: String| Error::MalformedRow { line, message };
        let date_s = record.get(date_col).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_s, "%Y-%m-%d").map_err(|e| bad(format!("bad date {date_s:?}: {e}")))?;
        let regime = record.get(regime_col).unwrap_or("").parse::<Regime>().map_err(bad)?;
        out.push((date, regime));
    }
    Ok(out)
}

pub fn load_regimes(path: impl AsRef<Path>) -> Result<Vec<(NaiveDate, Regime)>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_regimes(file)
}

/// One label per price day. Days without a label are unclassifiable; a label
/// for a date not in the price series is an error.
pub fn align_regimes(prices: &PriceSeries, labels: &[(NaiveDate, Regime)]) -> Result<Vec<Regime>> {
    let index: HashMap<NaiveDate, usize> = prices.points().iter().enumerate().map(|(k, p)| (p.date, k)).collect();
    let mut out = vec![Regime::Unclassifiable; prices.len()];
    let mut seen = vec![false; prices.len()];
    for (date, regime) in labels {
        let &k = index
            .get(date)
            .ok_or_else(|| Error::Misaligned(format!("regime label for {date}, which has no price")))?;
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::Misaligned(format!("two regime labels for {date}")));
        }
        out[k] = *regime;
    }
    Ok(out)
}

/// Inclusive run of positions `start..=end` in a lambda sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// Maximal runs of `lambda == 0`. A run may open on the very first day;
/// degenerate days (`None`) end a run.
pub fn abn_spans(lambdas: &[Option<f64>]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for (k, l) in lambdas.iter().enumerate() {
        match (l, open) {
            (Some(v), None) if *v == 0.0 => open = Some(k),
            (Some(v), Some(_)) if *v == 0.0 => {}
            (_, Some(start)) => {
                spans.push(Span { start, end: k - 1 });
                open = None;
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        spans.push(Span {
            start,
            end: lambdas.len() - 1,
        });
    }
    spans
}

/// Non-stationary spans of the conventional Test(ABN), in positions of `lambdas`.
pub fn abn_baseline(lambdas: &LambdaSeries) -> Vec<Span> {
    if lambdas.alpha != 1.0 {
        warn!("Test(ABN) expects lambda computed at alpha = 1, got alpha = {}", lambdas.alpha);
    }
    abn_spans(&lambdas.lambdas())
}

/// Fourth standardized sample moment minus 3 (population moments).
pub fn excess_kurtosis(values: &[f64]) -> Result<f64> {
    if values.len() < 4 {
        return Err(Error::invalid("values", format!("need at least 4 values, got {}", values.len())));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (m2, m4) = values.iter().fold((0.0, 0.0), |(a, b), x| {
        let d = (x - mean) * (x - mean);
        (a + d, b + d * d)
    });
    let (m2, m4) = (m2 / n, m4 / n);
    if !(m2 > 0.0) {
        return Err(Error::Degenerate("variance is zero".into()));
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSummary {
    pub days: usize,
    pub stationary: usize,
    pub intermediate: usize,
    pub non_stationary: usize,
    pub unclassifiable: usize,
    /// Fractions over classified days.
    pub frac_stationary: f64,
    pub frac_intermediate: f64,
    pub frac_non_stationary: f64,
    /// All log-returns of the input.
    pub kurtosis_all: Option<f64>,
    /// Log-returns of stationary days only.
    pub kurtosis_stationary: Option<f64>,
}

pub fn summarize(ccr: &CcrSeries, regimes: &RegimeSeries) -> RegimeSummary {
    let count = |r: Regime| regimes.points.iter().filter(|p| p.regime == r).count();
    let (s, i, n, u) = (
        count(Regime::Stationary),
        count(Regime::Intermediate),
        count(Regime::NonStationary),
        count(Regime::Unclassifiable),
    );
    let classified = (s + i + n) as f64;
    let frac = |c: usize| if classified > 0.0 { c as f64 / classified } else { 0.0 };
    let stationary_ccr: Vec<f64> = regimes
        .points
        .iter()
        .filter(|p| p.regime == Regime::Stationary && p.day >= 1 && p.day - 1 < ccr.len())
        .map(|p| ccr.values[p.day - 1])
        .collect();
    RegimeSummary {
        days: regimes.points.len(),
        stationary: s,
        intermediate: i,
        non_stationary: n,
        unclassifiable: u,
        frac_stationary: frac(s),
        frac_intermediate: frac(i),
        frac_non_stationary: frac(n),
        kurtosis_all: excess_kurtosis(&ccr.values).ok(),
        kurtosis_stationary: excess_kurtosis(&stationary_ccr).ok(),
    }
}
