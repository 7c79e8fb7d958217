use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::regime::Regime;

use super::indicators::{ma_trend, up_moves, Trend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Position {
    Long,
    #[default]
    Flat,
    Short,
}

impl Position {
    pub fn sign(self) -> f64 {
        match self {
            Position::Long => 1.0,
            Position::Flat => 0.0,
            Position::Short => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Position::Long => "long",
            Position::Flat => "flat",
            Position::Short => "short",
        }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndicatorParams {
    pub n_ma: usize,
    pub n_psy: usize,
    /// Even `n_psy` leaves `Psy = 1/2` uncovered; that case then keeps the
    /// previous target.
    pub allow_even_psy: bool,
}

impl IndicatorParams {
    pub fn new(n_ma: usize, n_psy: usize) -> Self {
        Self {
            n_ma,
            n_psy,
            allow_even_psy: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ma < 2 {
            return Err(Error::invalid("n_ma", format!("must be >= 2, got {}", self.n_ma)));
        }
        if self.n_psy < 1 {
            return Err(Error::invalid("n_psy", "must be >= 1"));
        }
        if self.n_psy.is_multiple_of(2) && !self.allow_even_psy {
            return Err(Error::invalid(
                "n_psy",
                format!("must be odd unless even values are explicitly allowed, got {}", self.n_psy),
            ));
        }
        Ok(())
    }
}

/// Which rules are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrategyMode {
    /// Trend on stationary days, contrarian on non-stationary days, flat otherwise.
    #[default]
    Full,
    /// Contrarian on non-stationary days, flat everywhere else.
    Rule2Only,
    /// Trend following on every day regardless of regime.
    MaOnly,
}

impl fmt::Display for StrategyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyMode::Full => "full",
            StrategyMode::Rule2Only => "rule2-only",
            StrategyMode::MaOnly => "ma-only",
        })
    }
}

impl FromStr for StrategyMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "full" => Ok(StrategyMode::Full),
            "rule2-only" => Ok(StrategyMode::Rule2Only),
            "ma-only" => Ok(StrategyMode::MaOnly),
            other => Err(format!("expected full, rule2-only or ma-only, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Target {
    pub position: Position,
    /// The active indicator lacked history, so the target fell back to flat.
    pub short_history: bool,
}

impl Target {
    fn ok(position: Position) -> Self {
        Self {
            position,
            short_history: false,
        }
    }
}

fn trend_rule(closes: &[f64], params: &IndicatorParams, i: usize) -> Target {
    match ma_trend(closes, params.n_ma, i) {
        Ok(Trend::Up) => Target::ok(Position::Long),
        Ok(Trend::Down) => Target::ok(Position::Short),
        Err(_) => Target {
            position: Position::Flat,
            short_history: true,
        },
    }
}

fn contrarian_rule(closes: &[f64], params: &IndicatorParams, i: usize, previous: Position) -> Target {
    let n = params.n_psy;
    match up_moves(closes, n, i) {
        // Psy <= (n-1)/(2n) and Psy >= (n+1)/(2n), in integers
        Ok(ups) if 2 * ups < n => Target::ok(Position::Long),
        Ok(ups) if 2 * ups > n => Target::ok(Position::Short),
        Ok(_) => Target::ok(previous),
        Err(_) => Target {
            position: Position::Flat,
            short_history: true,
        },
    }
}

/// Position wanted after day `i`'s close, from information through day `i`.
pub fn target_position(
    regime: Regime,
    closes: &[f64],
    params: &IndicatorParams,
    mode: StrategyMode,
    i: usize,
    previous: Position,
) -> Target {
    match (mode, regime) {
        (StrategyMode::MaOnly, _) => trend_rule(closes, params, i),
        (StrategyMode::Full, Regime::Stationary) => trend_rule(closes, params, i),
        (StrategyMode::Full | StrategyMode::Rule2Only, Regime::NonStationary) => {
            contrarian_rule(closes, params, i, previous)
        }
        _ => Target::ok(Position::Flat),
    }
}
