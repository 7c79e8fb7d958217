//! KM2O-Langevin analysis of a two-channel series.
//!
//! A pair is standardized per channel, its sample covariance function is
//! turned into the forward and backward dissipation/fluctuation matrices by
//! the order recursion in [`levinson`], and overlapping pieces of the pair are
//! whitened with the forward system. Each whitened piece is flattened to one
//! dimension and checked against three white-noise criteria; the pass rates
//! decide the Test(S) verdict.

mod covariance;
mod criteria;
mod levinson;
mod test_s;
mod whitening;

pub use covariance::{sample_covariance, standardize, CovSequence, StandardizedPair};
pub use criteria::{
    block_counts, criterion_mean, criterion_orthogonality, criterion_variance, default_lag_budget,
    orthogonality_rate, OrthogonalityMode, MEAN_BOUND, ORTHOGONALITY_BOUND, ORTHOGONALITY_RATE,
    VARIANCE_BOUND,
};
pub use levinson::{is_positive_definite, levinson, Km2oSystem};
pub use test_s::{default_order, piece_outcomes, test_s, PieceOutcome, StationarityVerdict, TestSConfig};
pub use whitening::{extract_pieces, fluctuations, whitening_factor, WhitenedPieces};

pub type Mat2 = nalgebra::Matrix2<f64>;
pub type Vec2 = nalgebra::Vector2<f64>;
