//! Shewhart x̄-chart limits from robust scale estimates.
//!
//! The half-width factors are A3 = 3/(c4·√n), A5 = 3/(c5·√n) and
//! A6 = 3/(c6·√n), applied to the mean of the per-subgroup standard
//! deviations, consistent MADs or consistent Shamos estimates. The module
//! also runs the single-outlier contamination experiment on the resulting
//! three-sigma estimates.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::calibration::engine::{merge_ordered, par_chunks, Workers, MIN_REPLICATIONS};
use crate::calibration::moments::Moments;
use crate::calibration::rng::Substream;
use crate::error::{Error, Result};
use crate::estimators::Scratch;
use crate::factors::{c4, c5, c6};
use crate::sample::EstimatorKind;

pub fn a3(n: usize) -> Result<f64> {
    Ok(3.0 / (c4(n)? * (n as f64).sqrt()))
}

pub fn a5(n: usize) -> Result<f64> {
    Ok(3.0 / (c5(n)? * (n as f64).sqrt()))
}

pub fn a6(n: usize) -> Result<f64> {
    Ok(3.0 / (c6(n)? * (n as f64).sqrt()))
}

/// Mean, standard deviation, consistent MAD and consistent Shamos of one
/// subgroup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubgroupStats {
    pub mean: f64,
    pub std_dev: f64,
    pub mad: f64,
    pub shamos: f64,
}

impl SubgroupStats {
    fn compute(row: &[f64], scratch: &mut Scratch) -> Self {
        Self {
            mean: scratch.evaluate(EstimatorKind::Mean, row),
            std_dev: scratch.evaluate(EstimatorKind::StdDev, row),
            mad: scratch.evaluate(EstimatorKind::Mad, row),
            shamos: scratch.evaluate(EstimatorKind::Shamos, row),
        }
    }
}

/// k subgroups of a common size n ≥ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupSeries {
    n: usize,
    rows: Vec<Vec<f64>>,
    stats: Vec<SubgroupStats>,
}

impl SubgroupSeries {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map(Vec::len).ok_or(Error::EmptySample)?;
        if n < 2 {
            return Err(Error::TooSmall {
                estimator: EstimatorKind::StdDev,
                n,
                min: 2,
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "subgroup {} has {} values, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    index: i * n + j,
                    value: row[j],
                });
            }
        }
        let mut scratch = Scratch::new();
        let stats = rows.iter().map(|r| SubgroupStats::compute(r, &mut scratch)).collect();
        Ok(Self { n, rows, stats })
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn stats(&self) -> &[SubgroupStats] {
        &self.stats
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartMethod {
    StdC4,
    MadC5,
    ShamosC6,
}

impl ChartMethod {
    pub const ALL: [ChartMethod; 3] = [Self::StdC4, Self::MadC5, Self::ShamosC6];

    /// The A factor at subgroup size n.
    pub fn factor(self, n: usize) -> Result<f64> {
        match self {
            Self::StdC4 => a3(n),
            Self::MadC5 => a5(n),
            Self::ShamosC6 => a6(n),
        }
    }

    fn scale(self, s: &SubgroupStats) -> f64 {
        match self {
            Self::StdC4 => s.std_dev,
            Self::MadC5 => s.mad,
            Self::ShamosC6 => s.shamos,
        }
    }
}

impl fmt::Display for ChartMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::StdC4 => "std-c4",
            Self::MadC5 => "mad-c5",
            Self::ShamosC6 => "shamos-c6",
        })
    }
}

impl FromStr for ChartMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "std-c4" | "std" | "sd" => Ok(Self::StdC4),
            "mad-c5" | "mad" => Ok(Self::MadC5),
            "shamos-c6" | "shamos" => Ok(Self::ShamosC6),
            other => Err(Error::InvalidConfig(format!("unknown chart method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartLimits {
    pub center: f64,
    pub ucl: f64,
    pub lcl: f64,
    pub method: ChartMethod,
    /// estimate of 3σ for individual observations
    pub three_sigma: f64,
    pub n: usize,
}

/// Where a subgroup mean falls relative to the limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    InControl,
    AboveUcl,
    BelowLcl,
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::InControl => "in-control",
            Self::AboveUcl => "above-ucl",
            Self::BelowLcl => "below-lcl",
        })
    }
}

impl ChartLimits {
    /// Phase-II check of one new subgroup against these limits.
    pub fn classify(&self, subgroup: &[f64]) -> Result<Signal> {
        if subgroup.len() != self.n {
            return Err(Error::InvalidConfig(format!(
                "subgroup has {} values, limits are for n = {}",
                subgroup.len(),
                self.n
            )));
        }
        if let Some(i) = subgroup.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                index: i,
                value: subgroup[i],
            });
        }
        let mean = subgroup.iter().sum::<f64>() / self.n as f64;
        Ok(if mean > self.ucl {
            Signal::AboveUcl
        } else if mean < self.lcl {
            Signal::BelowLcl
        } else {
            Signal::InControl
        })
    }
}

/// Center line at the grand mean, half-width A(n) times the mean subgroup
/// scale.
pub fn chart_limits(series: &SubgroupSeries, method: ChartMethod) -> Result<ChartLimits> {
    let n = series.n;
    let k = series.k() as f64;
    let center = series.stats.iter().map(|s| s.mean).sum::<f64>() / k;
    let scale = series.stats.iter().map(|s| method.scale(s)).sum::<f64>() / k;
    let a = method.factor(n)?;
    let half = a * scale;
    Ok(ChartLimits {
        center,
        ucl: center + half,
        lcl: center - half,
        method,
        three_sigma: (n as f64).sqrt() * half,
        n,
    })
}

/// The six three-sigma estimators compared in the contamination experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaleMethod {
    Std,
    UnbiasedStd,
    Mad,
    UnbiasedMad,
    Shamos,
    UnbiasedShamos,
}

impl ScaleMethod {
    pub const ALL: [ScaleMethod; 6] = [
        Self::Std,
        Self::UnbiasedStd,
        Self::Mad,
        Self::UnbiasedMad,
        Self::Shamos,
        Self::UnbiasedShamos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Std => "std",
            Self::UnbiasedStd => "unbiased-std",
            Self::Mad => "mad",
            Self::UnbiasedMad => "unbiased-mad",
            Self::Shamos => "shamos",
            Self::UnbiasedShamos => "unbiased-shamos",
        }
    }
}

impl fmt::Display for ScaleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContaminationConfig {
    pub k: usize,
    pub n: usize,
    pub mu: f64,
    pub sigma: f64,
    pub deltas: Vec<f64>,
    pub replications: u64,
    pub seed: u64,
    /// observations shifted by δ, counted row by row from X₁₁
    pub corrupted: usize,
    pub workers: Workers,
}

impl ContaminationConfig {
    /// k = 10 subgroups of n = 5 from N(5, 1), δ ∈ {0, 10, …, 50}, 10⁴
    /// replications, one corrupted observation.
    pub fn standard(seed: u64) -> Self {
        Self {
            k: 10,
            n: 5,
            mu: 5.0,
            sigma: 1.0,
            deltas: vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0],
            replications: 10_000,
            seed,
            corrupted: 1,
            workers: Workers::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRow {
    pub delta: f64,
    pub method: ScaleMethod,
    /// mean three-sigma estimate minus 3σ
    pub bias: f64,
    pub variance: f64,
    /// bias² + variance
    pub mse: f64,
    /// standard error of `bias`
    pub mc_se: f64,
    pub replications: u64,
}

// keeps experiment streams apart from the calibration engine's, which are
// keyed by sample size alone
const SPC_STREAM_TAG: u64 = 0x5350_4300_0000_0000;

/// Each replication draws k·n observations from N(μ, σ²) once and reuses
/// them for every δ, shifting the first `corrupted` observations by δ.
pub fn contamination_experiment(cfg: &ContaminationConfig) -> Result<Vec<ExperimentRow>> {
    let (k, n) = (cfg.k, cfg.n);
    if k == 0 || n < 2 {
        return Err(Error::InvalidConfig(format!("need k ≥ 1 and n ≥ 2, got k = {k}, n = {n}")));
    }
    if cfg.replications < MIN_REPLICATIONS {
        return Err(Error::InvalidConfig(format!(
            "need at least {MIN_REPLICATIONS} replications, got {}",
            cfg.replications
        )));
    }
    if !(cfg.sigma.is_finite() && cfg.sigma > 0.0 && cfg.mu.is_finite()) {
        return Err(Error::InvalidConfig("mu must be finite and sigma positive".into()));
    }
    if cfg.deltas.is_empty() || cfg.deltas.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidConfig("need at least one finite delta".into()));
    }
    if cfg.corrupted > k * n {
        return Err(Error::InvalidConfig(format!(
            "cannot corrupt {} of {} observations",
            cfg.corrupted,
            k * n
        )));
    }
    let (c4, c5, c6) = (c4(n)?, c5(n)?, c6(n)?);
    let touched = cfg.corrupted.div_ceil(n);
    let width = cfg.deltas.len() * ScaleMethod::ALL.len();
    let key = SPC_STREAM_TAG ^ ((k as u64) << 24) ^ n as u64;

    let chunks = par_chunks(cfg.replications, cfg.workers, |range| {
        let mut acc = vec![Moments::new(); width];
        let mut scratch = Scratch::new();
        let mut data = vec![0.0; k * n];
        let mut shifted = vec![0.0; touched * n];
        for r in range {
            let mut stream = Substream::new(cfg.seed, key, r);
            for x in data.iter_mut() {
                *x = cfg.mu + cfg.sigma * stream.normal();
            }
            let (mut sd, mut mad, mut sh) = (0.0, 0.0, 0.0);
            for row in data.chunks_exact(n).skip(touched) {
                let s = SubgroupStats::compute(row, &mut scratch);
                sd += s.std_dev;
                mad += s.mad;
                sh += s.shamos;
            }
            for (d, &delta) in cfg.deltas.iter().enumerate() {
                shifted.copy_from_slice(&data[..touched * n]);
                for x in &mut shifted[..cfg.corrupted] {
                    *x += delta;
                }
                let (mut sd_d, mut mad_d, mut sh_d) = (sd, mad, sh);
                for row in shifted.chunks_exact(n) {
                    let s = SubgroupStats::compute(row, &mut scratch);
                    sd_d += s.std_dev;
                    mad_d += s.mad;
                    sh_d += s.shamos;
                }
                let kf = k as f64;
                let (sd_d, mad_d, sh_d) = (3.0 * sd_d / kf, 3.0 * mad_d / kf, 3.0 * sh_d / kf);
                let values = [sd_d, sd_d / c4, mad_d, mad_d / c5, sh_d, sh_d / c6];
                for (m, v) in acc[d * 6..(d + 1) * 6].iter_mut().zip(values) {
                    m.push(v);
                }
            }
        }
        acc
    })?;
    let moments = merge_ordered(chunks, width);
    let target = 3.0 * cfg.sigma;
    let mut rows = Vec::with_capacity(width);
    for (d, &delta) in cfg.deltas.iter().enumerate() {
        for (j, &method) in ScaleMethod::ALL.iter().enumerate() {
            let m = &moments[d * 6 + j];
            let bias = m.mean - target;
            let variance = m.variance();
            rows.push(ExperimentRow {
                delta,
                method,
                bias,
                variance,
                mse: bias * bias + variance,
                mc_se: m.mean_standard_error(),
                replications: m.count,
            });
        }
    }
    Ok(rows)
}

pub const EXPERIMENT_HEADER: &str = "delta,method,bias,variance,mse,reps";

pub fn experiment_csv(rows: &[ExperimentRow]) -> String {
    let mut out = format!("{EXPERIMENT_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{:.5},{:.5},{:.5},{}",
            r.delta, r.method, r.bias, r.variance, r.mse, r.replications
        )
        .unwrap();
    }
    out
}
