//! Regression models for n beyond the tabulated range.

use std::fmt;

use crate::error::{Error, Result};
use crate::sample::EstimatorKind;

/// Functional form of a bias model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelForm {
    /// p/n + q/n²
    Hayes,
    /// amp·n^(−exponent); `amp` carries the sign
    Williams,
}

impl fmt::Display for ModelForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hayes => "hayes",
            Self::Williams => "williams",
        })
    }
}

impl std::str::FromStr for ModelForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hayes" => Ok(Self::Hayes),
            "williams" => Ok(Self::Williams),
            other => Err(Error::InvalidConfig(format!("unknown model form '{other}'"))),
        }
    }
}

/// What a fitted model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelTarget {
    /// A_n, the bias of the consistent MAD at N(0, 1)
    MadBias,
    /// B_n, the bias of the consistent Shamos estimator at N(0, 1)
    ShamosBias,
    /// offset of a normalized variance from its asymptote
    NormalizedVariance(EstimatorKind),
    Unspecified,
}

/// A fitted bias model. Coefficients are `[p, q]` for Hayes and
/// `[amp, exponent]` for Williams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasModel {
    pub form: ModelForm,
    pub target: ModelTarget,
    pub coefficients: [f64; 2],
    pub rss: f64,
}

impl BiasModel {
    pub const fn hayes(target: ModelTarget, p: f64, q: f64) -> Self {
        Self {
            form: ModelForm::Hayes,
            target,
            coefficients: [p, q],
            rss: 0.0,
        }
    }

    pub const fn williams(target: ModelTarget, amp: f64, exponent: f64) -> Self {
        Self {
            form: ModelForm::Williams,
            target,
            coefficients: [amp, exponent],
            rss: 0.0,
        }
    }

    pub fn with_target(mut self, target: ModelTarget) -> Self {
        self.target = target;
        self
    }

    pub fn eval(&self, n: f64) -> f64 {
        match self.form {
            ModelForm::Hayes => hayes_eval(self.coefficients, n),
            ModelForm::Williams => williams_eval(self.coefficients, n),
        }
    }
}

/// p/n + q/n², evaluated in powers of 1/n.
pub fn hayes_eval([p, q]: [f64; 2], n: f64) -> f64 {
    let inv = 1.0 / n;
    inv * (p + q * inv)
}

/// amp·n^(−exponent).
pub fn williams_eval([amp, exponent]: [f64; 2], n: f64) -> f64 {
    amp * n.powf(-exponent)
}

/// Published least-squares fits of A_n and B_n.
pub const HAYES_A: BiasModel = BiasModel::hayes(ModelTarget::MadBias, -0.76213, -0.86413);
pub const WILLIAMS_A: BiasModel = BiasModel::williams(ModelTarget::MadBias, -0.804168866, 1.008922);
pub const HAYES_B: BiasModel = BiasModel::hayes(ModelTarget::ShamosBias, 0.414253297, 0.442396799);
pub const WILLIAMS_B: BiasModel =
    BiasModel::williams(ModelTarget::ShamosBias, 0.435760656, 1.0084443);

pub fn mad_bias_model(form: ModelForm) -> BiasModel {
    match form {
        ModelForm::Hayes => HAYES_A,
        ModelForm::Williams => WILLIAMS_A,
    }
}

pub fn shamos_bias_model(form: ModelForm) -> BiasModel {
    match form {
        ModelForm::Hayes => HAYES_B,
        ModelForm::Williams => WILLIAMS_B,
    }
}

/// `asymptote + a1/n + a2/n²` for a normalized variance: n·Var for location
/// estimators, Var/(1 − c4(n)²) for scale estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceModel {
    pub asymptote: f64,
    pub a1: f64,
    pub a2: f64,
}

impl VarianceModel {
    const fn new(asymptote: f64, a1: f64, a2: f64) -> Self {
        Self { asymptote, a1, a2 }
    }

    pub fn eval(&self, n: f64) -> f64 {
        self.asymptote + hayes_eval([self.a1, self.a2], n)
    }
}

// 1/ARE at the normal: 1/(2/π), 1/(3/π), 1/0.37, 1/0.863 as rounded in print
pub const MEDIAN_ASYMPTOTE: f64 = 1.5700;
pub const HL_ASYMPTOTE: f64 = 1.0472;
pub const MAD_ASYMPTOTE: f64 = 2.7027;
pub const SHAMOS_ASYMPTOTE: f64 = 1.15875;

const MEDIAN_ODD: VarianceModel = VarianceModel::new(MEDIAN_ASYMPTOTE, -0.6589, -0.943);
const MEDIAN_EVEN: VarianceModel = VarianceModel::new(MEDIAN_ASYMPTOTE, -2.1950, 1.929);
const HL1: VarianceModel = VarianceModel::new(HL_ASYMPTOTE, 0.1127, 0.8365);
const HL2: VarianceModel = VarianceModel::new(HL_ASYMPTOTE, 0.2923, 0.2258);
const HL3: VarianceModel = VarianceModel::new(HL_ASYMPTOTE, 0.2022, 0.4343);
const MAD_ODD: VarianceModel = VarianceModel::new(MAD_ASYMPTOTE, 0.2996, -149.357);
const MAD_EVEN: VarianceModel = VarianceModel::new(MAD_ASYMPTOTE, -2.417, -153.010);
const SHAMOS: VarianceModel = VarianceModel::new(SHAMOS_ASYMPTOTE, 2.822, 12.238);
// mean and sd are their own baselines
const UNIT: VarianceModel = VarianceModel::new(1.0, 0.0, 0.0);

/// Fitted normalized-variance model for `kind` at sample size `n`; median
/// and MAD have separate odd/even fits.
pub fn variance_model(kind: EstimatorKind, n: usize) -> VarianceModel {
    let odd = n % 2 == 1;
    match kind {
        EstimatorKind::Median if odd => MEDIAN_ODD,
        EstimatorKind::Median => MEDIAN_EVEN,
        EstimatorKind::Mad if odd => MAD_ODD,
        EstimatorKind::Mad => MAD_EVEN,
        EstimatorKind::Hl1 => HL1,
        EstimatorKind::Hl2 => HL2,
        EstimatorKind::Hl3 => HL3,
        EstimatorKind::Shamos => SHAMOS,
        EstimatorKind::Mean | EstimatorKind::StdDev => UNIT,
    }
}

/// The fitted models cover n > 100 only; smaller n comes from the tables.
pub fn variance_model_eval(kind: EstimatorKind, n: usize) -> Result<f64> {
    if n <= 100 {
        return Err(Error::InvalidConfig(format!(
            "variance models apply to n > 100, got {n}"
        )));
    }
    Ok(variance_model(kind, n).eval(n as f64))
}
