//! Location and scale estimators.
//!
//! The public functions validate their input and return tagged estimates.
//! [`Scratch`] exposes the same computations without allocation for the
//! Monte Carlo loops, which call them millions of times on known-good data.

use crate::error::{Error, Result};
use crate::factors::c4;
use crate::normal::{mad_consistency, shamos_consistency};
use crate::sample::{EstimatorKind, LocationEstimate, Sample, ScaleEstimate};
use crate::select::median_in_place;

/// Largest n for which pairwise estimators materialize their pair multiset.
pub const MAX_PAIR_N: usize = 10_000;

/// Which index pairs a Hodges-Lehmann estimator averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HlVariant {
    /// i < j
    Hl1,
    /// i <= j (the Walsh averages)
    Hl2,
    /// all (i, j)
    Hl3,
}

impl HlVariant {
    pub fn kind(self) -> EstimatorKind {
        match self {
            Self::Hl1 => EstimatorKind::Hl1,
            Self::Hl2 => EstimatorKind::Hl2,
            Self::Hl3 => EstimatorKind::Hl3,
        }
    }

    /// Number of pair averages for a sample of size `n`.
    pub fn pair_count(self, n: usize) -> usize {
        match self {
            Self::Hl1 => n * n.saturating_sub(1) / 2,
            Self::Hl2 => n * (n + 1) / 2,
            Self::Hl3 => n * n,
        }
    }
}

impl TryFrom<EstimatorKind> for HlVariant {
    type Error = Error;

    fn try_from(kind: EstimatorKind) -> Result<Self> {
        match kind {
            EstimatorKind::Hl1 => Ok(Self::Hl1),
            EstimatorKind::Hl2 => Ok(Self::Hl2),
            EstimatorKind::Hl3 => Ok(Self::Hl3),
            other => Err(Error::InvalidConfig(format!(
                "{other} is not a Hodges-Lehmann variant"
            ))),
        }
    }
}

fn location(kind: EstimatorKind, n: usize, value: f64) -> LocationEstimate {
    LocationEstimate {
        value,
        estimator: kind,
        n,
    }
}

fn scale(kind: EstimatorKind, n: usize, value: f64) -> ScaleEstimate {
    ScaleEstimate {
        value,
        estimator: kind,
        n,
    }
}

pub fn mean(s: &Sample) -> LocationEstimate {
    location(EstimatorKind::Mean, s.len(), mean_of(s.values()))
}

pub fn median(s: &Sample) -> LocationEstimate {
    let mut buf = s.values().to_vec();
    location(EstimatorKind::Median, s.len(), median_in_place(&mut buf))
}

/// Hodges-Lehmann estimate: the median of the chosen pair averages.
pub fn hl(s: &Sample, variant: HlVariant) -> Result<LocationEstimate> {
    let kind = variant.kind();
    check_pairwise(kind, s.len())?;
    let mut buf = Vec::new();
    let value = hl_with(s.values(), variant, &mut buf);
    Ok(location(kind, s.len(), value))
}

/// Median absolute deviation about the median. With `consistent` the result
/// is divided by Φ⁻¹(3/4) so it estimates σ at the normal.
pub fn mad(s: &Sample, consistent: bool) -> Result<ScaleEstimate> {
    EstimatorKind::Mad.check_n(s.len())?;
    let mut buf = Vec::new();
    let raw = raw_mad_with(s.values(), &mut buf);
    let value = if consistent {
        raw * mad_consistency()
    } else {
        raw
    };
    Ok(scale(EstimatorKind::Mad, s.len(), value))
}

/// Median of the pairwise absolute differences over i < j, divided by
/// √2·Φ⁻¹(3/4) when `consistent` is set.
pub fn shamos(s: &Sample, consistent: bool) -> Result<ScaleEstimate> {
    check_pairwise(EstimatorKind::Shamos, s.len())?;
    let mut buf = Vec::new();
    let raw = raw_shamos_with(s.values(), &mut buf);
    let value = if consistent {
        raw * shamos_consistency()
    } else {
        raw
    };
    Ok(scale(EstimatorKind::Shamos, s.len(), value))
}

/// Sample standard deviation with the n − 1 denominator, optionally divided
/// by c4(n).
pub fn std_dev(s: &Sample, unbiased_c4: bool) -> Result<ScaleEstimate> {
    let n = s.len();
    EstimatorKind::StdDev.check_n(n)?;
    let sd = std_dev_of(s.values());
    let value = if unbiased_c4 { sd / c4(n)? } else { sd };
    Ok(scale(EstimatorKind::StdDev, n, value))
}

/// Evaluates any estimator in its default form: HL as defined, MAD and
/// Shamos Fisher-consistent, standard deviation without c4.
pub fn estimate(s: &Sample, kind: EstimatorKind) -> Result<f64> {
    kind.check_n(s.len())?;
    if matches!(kind, EstimatorKind::Hl1 | EstimatorKind::Hl2 | EstimatorKind::Hl3 | EstimatorKind::Shamos) {
        check_pairwise(kind, s.len())?;
    }
    Ok(Scratch::default().evaluate(kind, s.values()))
}

pub(crate) fn check_pairwise(kind: EstimatorKind, n: usize) -> Result<()> {
    kind.check_n(n)?;
    if n > MAX_PAIR_N {
        return Err(Error::SizeLimit {
            estimator: kind,
            n,
            max: MAX_PAIR_N,
        });
    }
    Ok(())
}

/// Reusable buffer for repeated estimator evaluation.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    buf: Vec<f64>,
}

impl Scratch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Same conventions as [`estimate`], without validation. The caller
    /// guarantees a finite slice satisfying the estimator's minimum size.
    pub fn evaluate(&mut self, kind: EstimatorKind, values: &[f64]) -> f64 {
        match kind {
            EstimatorKind::Mean => mean_of(values),
            EstimatorKind::Median => {
                self.buf.clear();
                self.buf.extend_from_slice(values);
                median_in_place(&mut self.buf)
            }
            EstimatorKind::Hl1 => hl_with(values, HlVariant::Hl1, &mut self.buf),
            EstimatorKind::Hl2 => hl_with(values, HlVariant::Hl2, &mut self.buf),
            EstimatorKind::Hl3 => hl_with(values, HlVariant::Hl3, &mut self.buf),
            EstimatorKind::StdDev => std_dev_of(values),
            EstimatorKind::Mad => raw_mad_with(values, &mut self.buf) * mad_consistency(),
            EstimatorKind::Shamos => raw_shamos_with(values, &mut self.buf) * shamos_consistency(),
        }
    }
}

pub(crate) fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn std_dev_of(values: &[f64]) -> f64 {
    let m = mean_of(values);
    let ss: f64 = values.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

fn hl_with(values: &[f64], variant: HlVariant, buf: &mut Vec<f64>) -> f64 {
    let n = values.len();
    buf.clear();
    buf.reserve(variant.pair_count(n));
    match variant {
        HlVariant::Hl1 => {
            for i in 0..n {
                for j in i + 1..n {
                    buf.push((values[i] + values[j]) / 2.0);
                }
            }
        }
        HlVariant::Hl2 => {
            for i in 0..n {
                for j in i..n {
                    buf.push((values[i] + values[j]) / 2.0);
                }
            }
        }
        HlVariant::Hl3 => {
            for &a in values {
                for &b in values {
                    buf.push((a + b) / 2.0);
                }
            }
        }
    }
    median_in_place(buf)
}

fn raw_mad_with(values: &[f64], buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend_from_slice(values);
    let center = median_in_place(buf);
    buf.clear();
    buf.extend(values.iter().map(|x| (x - center).abs()));
    median_in_place(buf)
}

fn raw_shamos_with(values: &[f64], buf: &mut Vec<f64>) -> f64 {
    let n = values.len();
    buf.clear();
    buf.reserve(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            buf.push((values[i] - values[j]).abs());
        }
    }
    median_in_place(buf)
}
