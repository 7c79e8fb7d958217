//! Regime-switching strategy: trend following on stationary days,
//! psychological-line contrarian trades on non-stationary days, flat
//! otherwise, executed one close after each decision.

mod backtest;
mod indicators;
mod metrics;
mod policy;
mod sweep;

pub use backtest::{backtest, BacktestResult, EquityPoint, OpenTrade, Trade};
pub use indicators::{ma_trend, moving_average, psych_line, up_moves, Trend};
pub use metrics::{max_drawdown, metrics, Metrics};
pub use policy::{target_position, IndicatorParams, Position, StrategyMode, Target};
pub use sweep::{sweep, SweepGrid, SweepRow};
