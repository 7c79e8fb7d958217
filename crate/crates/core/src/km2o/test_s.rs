use crate::error::{Error, Result};
use crate::transforms::PairSeries;

use super::{
    criterion_mean, criterion_orthogonality, criterion_variance, default_lag_budget, extract_pieces, levinson,
    standardize, OrthogonalityMode,
};

/// Pass-rate thresholds of the conventional test, before scaling by alpha.
pub const MEAN_RATE: f64 = 0.80;
pub const VARIANCE_RATE: f64 = 0.70;
pub const ORTHOGONALITY_PIECE_RATE: f64 = 0.80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSConfig {
    /// Relaxation factor in (0, 1]; 1 is the conventional test.
    pub alpha: f64,
    pub orthogonality: OrthogonalityMode,
    /// Lag budget for the orthogonality criterion; `None` uses
    /// [`default_lag_budget`] of the flattened piece length.
    pub lag_budget: Option<usize>,
}

impl Default for TestSConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            orthogonality: OrthogonalityMode::Sum,
            lag_budget: None,
        }
    }
}

impl TestSConfig {
    pub fn conventional() -> Self {
        Self {
            alpha: 1.0,
            ..Self::default()
        }
    }

    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid("alpha", format!("must lie in (0, 1], got {}", self.alpha)));
        }
        if self.lag_budget == Some(0) {
            return Err(Error::invalid("lag_budget", "must be >= 1"));
        }
        Ok(())
    }

    /// Required (mean, variance, orthogonality) pass rates.
    pub fn thresholds(&self) -> (f64, f64, f64) {
        (
            MEAN_RATE * self.alpha,
            VARIANCE_RATE * self.alpha,
            ORTHOGONALITY_PIECE_RATE * self.alpha,
        )
    }

    fn lag_budget_for(&self, flat_len: usize) -> Result<usize> {
        match self.lag_budget {
            None => Ok(default_lag_budget(flat_len)),
            Some(l) if l >= 1 && l < flat_len => Ok(l),
            Some(l) => Err(Error::invalid(
                "lag_budget",
                format!("must lie in 1..{flat_len} for pieces of {flat_len} values, got {l}"),
            )),
        }
    }
}

/// Order `M = floor(3 sqrt(len) / 2) - 1` for a two-channel series.
pub fn default_order(len: usize) -> usize {
    ((3.0 * (len as f64).sqrt() / 2.0).floor() as usize).saturating_sub(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityVerdict {
    pub rate_mean: f64,
    pub rate_var: f64,
    pub rate_orth: f64,
    pub passed: bool,
    pub degenerate: bool,
    pub order: usize,
    pub pieces: usize,
}

impl StationarityVerdict {
    fn degenerate(order: usize) -> Self {
        Self {
            rate_mean: 0.0,
            rate_var: 0.0,
            rate_orth: 0.0,
            passed: false,
            degenerate: true,
            order,
            pieces: 0,
        }
    }
}

/// Criterion outcomes for one whitened piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PieceOutcome {
    pub mean: bool,
    pub variance: bool,
    pub orthogonality: bool,
}

/// Per-piece outcomes, or `None` when the pair cannot be whitened.
pub fn piece_outcomes(pair: &PairSeries, cfg: &TestSConfig) -> Result<Option<Vec<PieceOutcome>>> {
    cfg.validate()?;
    let len = pair.len();
    let order = default_order(len);
    if order == 0 || len < 2 * order + 4 {
        return Err(Error::invalid(
            "pair length",
            format!("series of length {len} is too short for the stationarity test"),
        ));
    }
    let lag_budget = cfg.lag_budget_for(2 * (order + 1))?;

    let z = match standardize(pair) {
        Ok(z) => z,
        Err(Error::Degenerate(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let sys = levinson(&z.covariance(order)?, order);
    if sys.is_degenerate() {
        return Ok(None);
    }
    let pieces = match extract_pieces(&z, &sys) {
        Ok(p) => p,
        Err(Error::Degenerate(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let outcomes = pieces
        .iter()
        .map(|xi| PieceOutcome {
            mean: criterion_mean(xi),
            variance: criterion_variance(xi),
            orthogonality: criterion_orthogonality(xi, lag_budget, cfg.orthogonality),
        })
        .collect();
    Ok(Some(outcomes))
}

/// Test(S) with rate thresholds scaled by `cfg.alpha`, using one KM2O
/// system estimated from the whole pair.
pub fn test_s(pair: &PairSeries, cfg: &TestSConfig) -> Result<StationarityVerdict> {
    let order = default_order(pair.len());
    let Some(outcomes) = piece_outcomes(pair, cfg)? else {
        return Ok(StationarityVerdict::degenerate(order));
    };
    let n = outcomes.len() as f64;
    let rate = |f: fn(&PieceOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count() as f64 / n;
    let (rate_mean, rate_var, rate_orth) = (rate(|o| o.mean), rate(|o| o.variance), rate(|o| o.orthogonality));
    let (tm, tv, to) = cfg.thresholds();
    Ok(StationarityVerdict {
        rate_mean,
        rate_var,
        rate_orth,
        passed: rate_mean > tm && rate_var > tv && rate_orth > to,
        degenerate: false,
        order,
        pieces: outcomes.len(),
    })
}
