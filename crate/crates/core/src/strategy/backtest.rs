use chrono::NaiveDate;
use log::warn;

use crate::error::{Error, Result};
use crate::market_data::PriceSeries;
use crate::regime::Regime;

use super::metrics::{metrics, Metrics};
use super::policy::{target_position, IndicatorParams, Position, StrategyMode};

/// A closed round trip of one unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Trade {
    pub direction: Position,
    pub entry_day: usize,
    pub exit_day: usize,
    pub entry_date: NaiveDate,
    pub exit_date: NaiveDate,
    pub entry_price: f64,
    pub exit_price: f64,
    pub pnl: f64,
}

/// A position still held at the final close.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenTrade {
    pub direction: Position,
    pub entry_day: usize,
    pub entry_price: f64,
    pub unrealized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquityPoint {
    pub day: usize,
    pub date: NaiveDate,
    /// Position held after this day's close.
    pub position: Position,
    /// Realized plus open mark-to-market.
    pub equity: f64,
    pub realized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestResult {
    pub params: IndicatorParams,
    pub mode: StrategyMode,
    pub trades: Vec<Trade>,
    pub equity: Vec<EquityPoint>,
    pub open: Option<OpenTrade>,
    pub metrics: Metrics,
    /// Days whose active rule lacked history and defaulted to flat.
    pub short_history_days: usize,
}

/// Runs the strategy over `prices`, one regime label per price day.
///
/// The target computed at day `i` is executed at the close of day `i + 1`;
/// the last day's target is never executed.
pub fn backtest(
    prices: &PriceSeries,
    regimes: &[Regime],
    params: IndicatorParams,
    mode: StrategyMode,
) -> Result<BacktestResult> {
    params.validate()?;
    if regimes.len() != prices.len() {
        return Err(Error::Misaligned(format!(
            "{} regime labels for {} price days",
            regimes.len(),
            prices.len()
        )));
    }
    let points = prices.points();
    let closes = prices.closes();

    let mut trades = Vec::new();
    let mut equity = Vec::with_capacity(points.len());
    let mut held = Position::Flat;
    let mut entry: Option<(usize, f64)> = None;
    let mut realized = 0.0;
    let mut target = Position::Flat;
    let mut short_history_days = 0;

    for (i, p) in points.iter().enumerate() {
        if i > 0 && target != held {
            if let Some((day, price)) = entry.take() {
                let pnl = held.sign() * (p.close - price);
                realized += pnl;
                trades.push(Trade {
                    direction: held,
                    entry_day: day,
                    exit_day: i,
                    entry_date: points[day].date,
                    exit_date: p.date,
                    entry_price: price,
                    exit_price: p.close,
                    pnl,
                });
            }
            if target != Position::Flat {
                entry = Some((i, p.close));
            }
            held = target;
        }

        let open = entry.map_or(0.0, |(_, price)| held.sign() * (p.close - price));
        equity.push(EquityPoint {
            day: i,
            date: p.date,
            position: held,
            equity: realized + open,
            realized,
        });

        let t = target_position(regimes[i], &closes, &params, mode, i, target);
        if t.short_history {
            short_history_days += 1;
        }
        target = t.position;
    }

    if short_history_days > 0 {
        warn!(
            "{short_history_days} day(s) lacked indicator history (n_ma={}, n_psy={}) and stayed flat",
            params.n_ma, params.n_psy
        );
    }

    let last = *closes.last().expect("series has at least two points");
    let open = entry.map(|(day, price)| OpenTrade {
        direction: held,
        entry_day: day,
        entry_price: price,
        unrealized: held.sign() * (last - price),
    });
    let curve: Vec<f64> = equity.iter().map(|e| e.equity).collect();
    let metrics = metrics(&curve, &trades);

    Ok(BacktestResult {
        params,
        mode,
        trades,
        equity,
        open,
        metrics,
        short_history_days,
    })
}
