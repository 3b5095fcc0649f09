use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A non-empty collection of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for the `len`/`is_empty` pairing.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl TryFrom<&[f64]> for Sample {
    type Error = Error;

    fn try_from(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }
}

/// Which estimator a value came from, or which one to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    Mean,
    Median,
    Hl1,
    Hl2,
    Hl3,
    StdDev,
    Mad,
    Shamos,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 8] = [
        EstimatorKind::Mean,
        EstimatorKind::Median,
        EstimatorKind::Hl1,
        EstimatorKind::Hl2,
        EstimatorKind::Hl3,
        EstimatorKind::StdDev,
        EstimatorKind::Mad,
        EstimatorKind::Shamos,
    ];

    pub fn is_location(self) -> bool {
        matches!(
            self,
            Self::Mean | Self::Median | Self::Hl1 | Self::Hl2 | Self::Hl3
        )
    }

    pub fn is_scale(self) -> bool {
        !self.is_location()
    }

    /// Smallest sample size for which the estimator is defined.
    pub fn min_n(self) -> usize {
        match self {
            Self::Mean | Self::Median | Self::Hl2 | Self::Hl3 => 1,
            Self::Hl1 | Self::StdDev | Self::Mad | Self::Shamos => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::Median => "median",
            Self::Hl1 => "hl1",
            Self::Hl2 => "hl2",
            Self::Hl3 => "hl3",
            Self::StdDev => "sd",
            Self::Mad => "mad",
            Self::Shamos => "shamos",
        }
    }

    pub(crate) fn check_n(self, n: usize) -> Result<()> {
        if n < self.min_n() {
            Err(Error::TooSmall {
                estimator: self,
                n,
                min: self.min_n(),
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Self::Mean),
            "median" => Ok(Self::Median),
            "hl1" => Ok(Self::Hl1),
            "hl2" => Ok(Self::Hl2),
            "hl3" => Ok(Self::Hl3),
            "sd" | "std" | "stddev" | "std-dev" => Ok(Self::StdDev),
            "mad" => Ok(Self::Mad),
            "shamos" => Ok(Self::Shamos),
            other => Err(Error::InvalidConfig(format!("unknown estimator '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationEstimate {
    pub value: f64,
    pub estimator: EstimatorKind,
    pub n: usize,
}

/// A scale estimate; `value` is never negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleEstimate {
    pub value: f64,
    pub estimator: EstimatorKind,
    pub n: usize,
}
