use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::market_data::PriceSeries;
use crate::regime::Regime;

use super::backtest::backtest;
use super::metrics::Metrics;
use super::policy::{IndicatorParams, StrategyMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepGrid {
    pub n_ma: Vec<usize>,
    pub n_psy: Vec<usize>,
    pub allow_even_psy: bool,
}

impl SweepGrid {
    /// `n_ma` in 5..=30 against `n_psy` in {3, 5, 7, 9, 11}.
    pub fn standard() -> Self {
        Self {
            n_ma: (5..=30).collect(),
            n_psy: vec![3, 5, 7, 9, 11],
            allow_even_psy: false,
        }
    }

    pub fn params(&self) -> Vec<IndicatorParams> {
        let mut out = Vec::with_capacity(self.n_ma.len() * self.n_psy.len());
        for &n_ma in &self.n_ma {
            for &n_psy in &self.n_psy {
                out.push(IndicatorParams {
                    n_ma,
                    n_psy,
                    allow_even_psy: self.allow_even_psy,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: IndicatorParams,
    pub metrics: Metrics,
}

/// Backtests every grid point; rows come back by descending profit, ties
/// broken by ascending `(n_ma, n_psy)`.
pub fn sweep(prices: &PriceSeries, regimes: &[Regime], grid: &SweepGrid, mode: StrategyMode) -> Result<Vec<SweepRow>> {
    let params = grid.params();
    if params.is_empty() {
        return Err(Error::invalid("grid", "sweep grid is empty"));
    }
    for p in &params {
        p.validate()?;
    }
    let mut rows = params
        .into_par_iter()
        .map(|p| {
            backtest(prices, regimes, p, mode).map(|r| SweepRow {
                params: p,
                metrics: r.metrics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        b.metrics
            .profit
            .total_cmp(&a.metrics.profit)
            .then_with(|| key(a).cmp(&key(b)))
    });
    Ok(rows)
}

fn key(r: &SweepRow) -> (usize, usize) {
    (r.params.n_ma, r.params.n_psy)
}
