//! Finite-sample unbiasing and variance factors.
//!
//! * `c4(n)` is analytic.
//! * `c5(n) = 1 + A_n` and `c6(n) = 1 + B_n` are the mean values of the
//!   consistent MAD and Shamos estimators at N(0, 1).
//! * `v5(n)`, `v6(n)` are their variances at N(0, 1).
//!
//! For n ≤ 100 the empirical factors come straight from the embedded tables;
//! above that they come from the fitted models in [`models`]. The variance
//! tables hold normalized values (n·Var for location, Var/(1 − c4²) for
//! scale), converted to raw variances here.

pub mod models;
pub mod tables;

use statrs::function::gamma::ln_gamma;

use crate::breakdown::{breakdown_hl1, breakdown_hl2, breakdown_hl3, breakdown_median};
use crate::error::{Error, Result};
use crate::estimators;
use crate::sample::{EstimatorKind, Sample, ScaleEstimate};

pub use models::{BiasModel, ModelForm, ModelTarget, VarianceModel};

/// Largest n covered by the embedded tables.
pub const TABLE_MAX_N: usize = 100;

/// c4(n) = √(2/(n−1)) · Γ(n/2) / Γ((n−1)/2), so that E[S_n] = c4(n)·σ.
pub fn c4(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooSmall {
            estimator: EstimatorKind::StdDev,
            n,
            min: 2,
        });
    }
    let nf = n as f64;
    let log_ratio = ln_gamma(nf / 2.0) - ln_gamma((nf - 1.0) / 2.0);
    Ok((2.0 / (nf - 1.0)).sqrt() * log_ratio.exp())
}

/// Variance of S_n at N(0, 1): 1 − c4(n)².
pub fn sd_variance(n: usize) -> Result<f64> {
    let c = c4(n)?;
    Ok(1.0 - c * c)
}

/// Where the empirical factors of a [`FactorSet`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorSource {
    Table,
    HayesModel,
    WilliamsModel,
}

impl std::fmt::Display for FactorSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Table => "table",
            Self::HayesModel => "hayes-model",
            Self::WilliamsModel => "williams-model",
        })
    }
}

/// Breakdown points for the four estimator families at one n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakdownPoints {
    pub median_mad: f64,
    pub hl1_shamos: f64,
    pub hl2: f64,
    pub hl3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorSet {
    pub n: usize,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub v5: f64,
    pub v6: f64,
    pub source: FactorSource,
    pub breakdown: BreakdownPoints,
}

/// Factors at `n` using the default (Hayes) models beyond the tables.
pub fn factor_set(n: usize) -> Result<FactorSet> {
    factor_set_with(n, ModelForm::Hayes)
}

/// Factors at `n`; `form` selects the bias model used for n > 100. The
/// variance factors always use the Hayes-form variance models.
pub fn factor_set_with(n: usize, form: ModelForm) -> Result<FactorSet> {
    if n < 2 {
        return Err(Error::TooSmall {
            estimator: EstimatorKind::Mad,
            n,
            min: 2,
        });
    }
    let c4 = c4(n)?;
    let sd_var = 1.0 - c4 * c4;
    let (a_n, b_n, source) = if n <= TABLE_MAX_N {
        let t = tables::bias_table();
        (
            t.get(n, 0).ok_or(Error::Unavailable { what: "A_n", n })?,
            t.get(n, 1).ok_or(Error::Unavailable { what: "B_n", n })?,
            FactorSource::Table,
        )
    } else {
        let nf = n as f64;
        let source = match form {
            ModelForm::Hayes => FactorSource::HayesModel,
            ModelForm::Williams => FactorSource::WilliamsModel,
        };
        (
            models::mad_bias_model(form).eval(nf),
            models::shamos_bias_model(form).eval(nf),
            source,
        )
    };
    let v5 = normalized_variance(EstimatorKind::Mad, n)? * sd_var;
    let v6 = normalized_variance(EstimatorKind::Shamos, n)? * sd_var;
    Ok(FactorSet {
        n,
        c4,
        c5: 1.0 + a_n,
        c6: 1.0 + b_n,
        v5,
        v6,
        source,
        breakdown: BreakdownPoints {
            median_mad: breakdown_median(n)?.epsilon(),
            hl1_shamos: breakdown_hl1(n)?.epsilon(),
            hl2: breakdown_hl2(n)?.epsilon(),
            hl3: breakdown_hl3(n)?.epsilon(),
        },
    })
}

pub fn c5(n: usize) -> Result<f64> {
    Ok(factor_set(n)?.c5)
}

pub fn c6(n: usize) -> Result<f64> {
    Ok(factor_set(n)?.c6)
}

/// n·Var for location estimators or Var/(1 − c4²) for scale estimators, at
/// N(0, 1): tabulated for n ≤ 100, modelled beyond.
pub fn normalized_variance(kind: EstimatorKind, n: usize) -> Result<f64> {
    kind.check_n(n)?;
    if matches!(kind, EstimatorKind::Mean | EstimatorKind::StdDev) {
        return Ok(1.0);
    }
    if n <= TABLE_MAX_N {
        let column = match kind {
            EstimatorKind::Median => 0,
            EstimatorKind::Hl1 => 1,
            EstimatorKind::Hl2 => 2,
            EstimatorKind::Hl3 => 3,
            EstimatorKind::Mad => 4,
            EstimatorKind::Shamos => 5,
            EstimatorKind::Mean | EstimatorKind::StdDev => unreachable!(),
        };
        tables::nvar_table()
            .get(n, column)
            .ok_or(Error::Unavailable {
                what: "normalized variance",
                n,
            })
    } else {
        models::variance_model_eval(kind, n)
    }
}

/// Relative efficiency against the mean (location) or S_n (scale) at
/// N(0, 1): the baseline variance divided by the estimator's variance.
pub fn relative_efficiency(kind: EstimatorKind, n: usize) -> Result<f64> {
    Ok(1.0 / normalized_variance(kind, n)?)
}

/// MAD/c5(n), unbiased for σ at the normal.
pub fn unbiased_mad(s: &Sample) -> Result<ScaleEstimate> {
    let mut est = estimators::mad(s, true)?;
    est.value /= c5(s.len())?;
    Ok(est)
}

/// Shamos/c6(n), unbiased for σ at the normal.
pub fn unbiased_shamos(s: &Sample) -> Result<ScaleEstimate> {
    let mut est = estimators::shamos(s, true)?;
    est.value /= c6(s.len())?;
    Ok(est)
}

/// MAD²/(v5(n) + c5(n)²), unbiased for σ² at the normal.
pub fn unbiased_mad_sq(s: &Sample) -> Result<f64> {
    let f = factor_set(s.len())?;
    let m = estimators::mad(s, true)?.value;
    Ok(m * m / (f.v5 + f.c5 * f.c5))
}

/// Shamos²/(v6(n) + c6(n)²), unbiased for σ² at the normal.
pub fn unbiased_shamos_sq(s: &Sample) -> Result<f64> {
    let f = factor_set(s.len())?;
    let m = estimators::shamos(s, true)?.value;
    Ok(m * m / (f.v6 + f.c6 * f.c6))
}
