//! Robust location and scale estimation for small samples.
//!
//! Location: median and the three Hodges–Lehmann variants. Scale: MAD and
//! the Shamos estimator, with finite-sample unbiasing factors `c5(n)` and
//! `c6(n)` alongside the classical `c4(n)`. Also exact breakdown points,
//! a deterministic parallel Monte Carlo engine for regenerating the factor
//! tables, and Shewhart-chart helpers.

pub mod breakdown;
pub mod calibration;
pub mod error;
pub mod estimators;
pub mod factors;
pub mod normal;
pub mod sample;
pub mod select;
pub mod spc;

pub use breakdown::{breakdown, BreakdownResult};
pub use error::{Error, Result};
pub use estimators::{estimate, hl, mad, mean, median, shamos, std_dev, HlVariant};
pub use factors::{c4, factor_set, factor_set_with, FactorSet, FactorSource, ModelForm};
pub use sample::{EstimatorKind, LocationEstimate, Sample, ScaleEstimate};
pub use select::select_kth;
