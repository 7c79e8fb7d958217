//! Seeded synthetic price series with known return distributions.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::market_data::{PricePoint, PriceSeries};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    /// Log-returns iid Normal(mu, sigma^2).
    GaussianWalk { mu: f64, sigma: f64 },
    /// Zero-drift Gaussian log-returns whose standard deviation jumps from
    /// `sigma_before` to `sigma_after` at price index `switch_day`.
    VarianceSwitch {
        sigma_before: f64,
        sigma_after: f64,
        switch_day: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub length: usize,
    pub seed: u64,
    pub start_price: f64,
}

impl SynthSpec {
    pub const DEFAULT_START_PRICE: f64 = 10_000.0;

    pub fn gaussian_walk(length: usize, mu: f64, sigma: f64, seed: u64) -> Self {
        Self {
            kind: SynthKind::GaussianWalk { mu, sigma },
            length,
            seed,
            start_price: Self::DEFAULT_START_PRICE,
        }
    }

    pub fn variance_switch(length: usize, sigma_before: f64, sigma_after: f64, switch_day: usize, seed: u64) -> Self {
        Self {
            kind: SynthKind::VarianceSwitch {
                sigma_before,
                sigma_after,
                switch_day,
            },
            length,
            seed,
            start_price: Self::DEFAULT_START_PRICE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::invalid("length", format!("must be >= 2, got {}", self.length)));
        }
        if !(self.start_price > 0.0 && self.start_price.is_finite()) {
            return Err(Error::invalid("start_price", "must be positive"));
        }
        match self.kind {
            SynthKind::GaussianWalk { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::invalid("mu", "must be finite"));
                }
                // sigma = 0 is allowed and yields a deterministic exponential path.
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    return Err(Error::invalid("sigma", format!("must be >= 0, got {sigma}")));
                }
            }
            SynthKind::VarianceSwitch {
                sigma_before,
                sigma_after,
                switch_day,
            } => {
                for (field, s) in [("sigma_before", sigma_before), ("sigma_after", sigma_after)] {
                    if !(s > 0.0 && s.is_finite()) {
                        return Err(Error::invalid(field, format!("must be > 0, got {s}")));
                    }
                }
                if switch_day == 0 || switch_day >= self.length {
                    return Err(Error::invalid(
                        "switch_day",
                        format!("must satisfy 0 < switch_day < {}, got {switch_day}", self.length),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Standard deviation and mean of the log-return that ends at price index `day`.
    fn return_params(&self, day: usize) -> (f64, f64) {
        match self.kind {
            SynthKind::GaussianWalk { mu, sigma } => (mu, sigma),
            SynthKind::VarianceSwitch {
                sigma_before,
                sigma_after,
                switch_day,
            } => (0.0, if day >= switch_day { sigma_after } else { sigma_before }),
        }
    }
}

/// Consecutive weekdays starting from 2000-01-03 (a Monday).
pub fn weekday_calendar(count: usize) -> Vec<NaiveDate> {
    let mut day = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(day);
        }
        day += Duration::days(1);
    }
    out
}

/// Generates a price path. A pure function of `spec`.
pub fn generate(spec: &SynthSpec) -> Result<PriceSeries> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dates = weekday_calendar(spec.length);
    let mut log_price = spec.start_price.ln();
    let mut points = Vec::with_capacity(spec.length);
    points.push(PricePoint {
        date: dates[0],
        close: spec.start_price,
    });
    for (day, &date) in dates.iter().enumerate().skip(1) {
        let z: f64 = StandardNormal.sample(&mut rng);
        let (mu, sigma) = spec.return_params(day);
        log_price += mu + sigma * z;
        points.push(PricePoint {
            date,
            close: log_price.exp(),
        });
    }
    PriceSeries::new(points)
}
