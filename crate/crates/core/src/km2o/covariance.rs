use crate::error::{Error, Result};
use crate::transforms::PairSeries;

use super::{Mat2, Vec2};

/// A pair with each channel centered and scaled to unit variance.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedPair {
    pub samples: Vec<Vec2>,
}

impl StandardizedPair {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `R(n) = (1/l) sum_{k=0}^{l-1-n} Z(k+n) Z(k)^T` for `n = 0..=max_lag`.
    pub fn covariance(&self, max_lag: usize) -> Result<CovSequence> {
        let len = self.len();
        if len < max_lag + 2 {
            return Err(Error::invalid(
                "max_lag",
                format!("series of length {len} supports lags up to {}, asked for {max_lag}", len.saturating_sub(2)),
            ));
        }
        let z = &self.samples;
        let lags = (0..=max_lag)
            .map(|n| {
                let sum = (0..len - n).fold(Mat2::zeros(), |acc, k| acc + z[k + n] * z[k].transpose());
                sum / len as f64
            })
            .collect();
        Ok(CovSequence { lags, len })
    }
}

fn standardize_channel(values: &[f64], name: &str) -> Result<Vec<f64>> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let scale = values.iter().map(|x| x * x).sum::<f64>() / n;
    if !(var > 1e-20 * scale) || !var.is_finite() {
        return Err(Error::Degenerate(format!("{name} channel has zero variance")));
    }
    let sd = var.sqrt();
    Ok(values.iter().map(|x| (x - mean) / sd).collect())
}

pub fn standardize(pair: &PairSeries) -> Result<StandardizedPair> {
    if pair.first.len() != pair.second.len() {
        return Err(Error::Misaligned("pair channels differ in length".into()));
    }
    if pair.is_empty() {
        return Err(Error::Degenerate("empty pair".into()));
    }
    let a = standardize_channel(&pair.first, "first")?;
    let b = standardize_channel(&pair.second, "second")?;
    Ok(StandardizedPair {
        samples: a.into_iter().zip(b).map(|(x, y)| Vec2::new(x, y)).collect(),
    })
}

/// Standardizes `pair` and returns its covariance up to `max_lag`.
pub fn sample_covariance(pair: &PairSeries, max_lag: usize) -> Result<CovSequence> {
    standardize(pair)?.covariance(max_lag)
}

/// Matrix covariance function `R(0..=M)` with `R(-n) = R(n)^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovSequence {
    lags: Vec<Mat2>,
    len: usize,
}

impl CovSequence {
    /// Wraps a covariance function given for non-negative lags. `len` is the
    /// length of the series it describes (informational for exact sequences).
    pub fn new(lags: Vec<Mat2>, len: usize) -> Self {
        assert!(!lags.is_empty(), "covariance needs at least R(0)");
        Self { lags, len }
    }

    pub fn max_lag(&self) -> usize {
        self.lags.len() - 1
    }

    pub fn series_len(&self) -> usize {
        self.len
    }

    /// `R(n)` for any signed lag within range.
    pub fn at(&self, n: isize) -> Mat2 {
        if n >= 0 {
            self.lags[n as usize]
        } else {
            self.lags[n.unsigned_abs()].transpose()
        }
    }

    pub fn lags(&self) -> &[Mat2] {
        &self.lags
    }
}
