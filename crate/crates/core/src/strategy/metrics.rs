use super::backtest::Trade;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub n_trade: usize,
    /// Sum of closed-trade P&L.
    pub profit: f64,
    pub gross_profit: f64,
    pub gross_loss: f64,
    /// Gross profit over gross loss; infinite when there are wins but no
    /// losses, zero when nothing was won.
    pub profit_factor: f64,
    /// Largest peak-to-trough fall of the mark-to-market equity curve.
    pub max_drawdown: f64,
    /// Same, over cumulative closed-trade P&L starting from zero.
    pub max_drawdown_realized: f64,
}

/// Largest `max_{s<=t} e(s) - e(t)` over the curve; zero for an empty curve.
pub fn max_drawdown(curve: &[f64]) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for &e in curve {
        peak = peak.max(e);
        worst = worst.max(peak - e);
    }
    worst
}

pub fn metrics(equity: &[f64], trades: &[Trade]) -> Metrics {
    let gross_profit: f64 = trades.iter().map(|t| t.pnl.max(0.0)).sum();
    let gross_loss: f64 = trades.iter().map(|t| (-t.pnl).max(0.0)).sum();
    let profit_factor = if gross_loss > 0.0 {
        gross_profit / gross_loss
    } else if gross_profit > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let mut realized = Vec::with_capacity(trades.len() + 1);
    realized.push(0.0);
    let mut acc = 0.0;
    for t in trades {
        acc += t.pnl;
        realized.push(acc);
    }
    Metrics {
        n_trade: trades.len(),
        profit: trades.iter().map(|t| t.pnl).sum(),
        gross_profit,
        gross_loss,
        profit_factor,
        max_drawdown: max_drawdown(equity),
        max_drawdown_realized: max_drawdown(&realized),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::Position;
    use chrono::NaiveDate;

    fn trade(pnl: f64) -> Trade {
        let d = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        Trade {
            direction: Position::Long,
            entry_day: 0,
            exit_day: 1,
            entry_date: d,
            exit_date: d,
            entry_price: 100.0,
            exit_price: 100.0 + pnl,
            pnl,
        }
    }

    #[test]
    fn drawdown_examples() {
        assert_eq!(max_drawdown(&[]), 0.0);
        assert_eq!(max_drawdown(&[0.0, 1.0, 2.0]), 0.0);
        assert_eq!(max_drawdown(&[0.0, 5.0, 2.0, 6.0, 1.0, 3.0]), 5.0);
        assert_eq!(max_drawdown(&[0.0, -2.0, -1.0]), 2.0);
    }

    #[test]
    fn profit_factor_cases() {
        let m = metrics(&[], &[trade(6.0), trade(-2.0), trade(3.0), trade(-1.0)]);
        assert_eq!((m.n_trade, m.profit, m.profit_factor), (4, 6.0, 3.0));
        assert_eq!(m.max_drawdown_realized, 2.0);
        assert_eq!(metrics(&[], &[trade(1.0)]).profit_factor, f64::INFINITY);
        assert_eq!(metrics(&[], &[]).profit_factor, 0.0);
        assert_eq!(metrics(&[], &[trade(-1.0)]).profit_factor, 0.0);
    }
}
