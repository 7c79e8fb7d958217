//! Stationarity classification of daily price series with KM2O-Langevin
//! matrix systems, and a regime-switching backtester built on top of it.
//!
//! The pipeline runs in four stages:
//!
//! - [`market_data`] loads or synthesizes a [`PriceSeries`];
//! - [`transforms`] turns it into log-returns, cuts normalized windows and
//!   builds the 171 two-channel pair series of nonlinear transforms;
//! - [`km2o`] whitens each pair with the forward KM2O-Langevin system and
//!   runs the mean / variance / orthogonality white-noise criteria;
//! - [`regime`] aggregates the per-pair verdicts into the stationarity
//!   parameter and the three-way day labels that [`strategy`] trades on.

pub mod error;
pub mod km2o;
pub mod market_data;
pub mod regime;
pub mod report;
pub mod strategy;
pub mod synth;
pub mod transforms;

pub use error::{Error, Result};
pub use market_data::PriceSeries;
