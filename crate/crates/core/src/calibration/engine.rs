//! Seeded, parallel Monte Carlo runs under N(0, 1).
//!
//! Replications are split into fixed-size chunks by index. Each chunk is
//! summarized independently and the summaries are merged in chunk order, so
//! the output depends only on the seed and the configuration, never on the
//! number of workers.

use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;

use super::moments::Moments;
use super::rng::Substream;
use crate::error::{Error, Result};
use crate::estimators::{check_pairwise, Scratch};
use crate::factors::sd_variance;
use crate::sample::EstimatorKind;

pub const DEFAULT_REPLICATIONS: u64 = 100_000;
pub const MIN_REPLICATIONS: u64 = 100;
/// Environment variable that overrides worker auto-detection.
pub const THREADS_ENV: &str = "ROBUST_FINITE_THREADS";

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    #[default]
    Auto,
    Fixed(usize),
}

impl Workers {
    pub fn resolve(self) -> Result<usize> {
        match self {
            Self::Fixed(0) => Err(Error::InvalidConfig("worker count must be positive".into())),
            Self::Fixed(w) => Ok(w),
            Self::Auto => match std::env::var(THREADS_ENV) {
                Ok(v) => match v.trim().parse::<usize>() {
                    Ok(w) if w > 0 => Ok(w),
                    _ => Err(Error::InvalidConfig(format!("{THREADS_ENV}='{v}' is not a positive integer"))),
                },
                Err(_) => Ok(std::thread::available_parallelism().map_or(1, |w| w.get())),
            },
        }
    }
}

impl FromStr for Workers {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(w) if w > 0 => Ok(Self::Fixed(w)),
            _ => Err(Error::InvalidConfig(format!("bad worker count '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub estimator: EstimatorKind,
    pub n_values: Vec<usize>,
    pub replications: u64,
    pub master_seed: u64,
    pub workers: Workers,
}

impl SimulationConfig {
    pub fn new(estimator: EstimatorKind, n_values: Vec<usize>, master_seed: u64) -> Self {
        Self {
            estimator,
            n_values,
            replications: DEFAULT_REPLICATIONS,
            master_seed,
            workers: Workers::Auto,
        }
    }

    pub fn with_replications(mut self, replications: u64) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_workers(mut self, workers: Workers) -> Self {
        self.workers = workers;
        self
    }
}

/// Summary of one estimator at one sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationResult {
    pub n: usize,
    pub estimator: EstimatorKind,
    pub mean_estimate: f64,
    /// mean − truth
    pub bias: f64,
    pub variance_estimate: f64,
    /// standard error of `mean_estimate` (and of `bias`)
    pub mc_standard_error: f64,
    pub variance_standard_error: f64,
    /// n·Var for location estimators, Var/(1 − c4²) for scale estimators
    pub normalized_variance: f64,
    pub normalized_standard_error: f64,
    pub replications: u64,
    pub seed: u64,
}

/// Value a consistent estimator targets at N(0, 1).
pub fn truth(kind: EstimatorKind) -> f64 {
    if kind.is_location() {
        0.0
    } else {
        1.0
    }
}

/// Multiplier from raw variance to the normalized form.
pub fn normalizer(kind: EstimatorKind, n: usize) -> Result<f64> {
    if kind.is_location() {
        Ok(n as f64)
    } else {
        Ok(1.0 / sd_variance(n)?)
    }
}

/// Runs `config.estimator` over every n in the configuration.
pub fn simulate(config: &SimulationConfig) -> Result<Vec<SimulationResult>> {
    let rows = simulate_many(
        &[config.estimator],
        &config.n_values,
        config.replications,
        config.master_seed,
        config.workers,
    )?;
    Ok(rows.into_iter().map(|mut r| r.remove(0)).collect())
}

/// Empirical bias per n. Same run as [`simulate_variance`]; both fill every
/// field of the result.
pub fn simulate_bias(config: &SimulationConfig) -> Result<Vec<SimulationResult>> {
    simulate(config)
}

/// Empirical variance per n, raw and normalized.
pub fn simulate_variance(config: &SimulationConfig) -> Result<Vec<SimulationResult>> {
    simulate(config)
}

/// Several estimators evaluated on the same samples. Result is indexed
/// `[n index][estimator index]`.
pub fn simulate_many(
    kinds: &[EstimatorKind],
    n_values: &[usize],
    replications: u64,
    master_seed: u64,
    workers: Workers,
) -> Result<Vec<Vec<SimulationResult>>> {
    if n_values.is_empty() {
        return Err(Error::InvalidConfig("no sample sizes given".into()));
    }
    n_values
        .iter()
        .map(|&n| {
            let moments = simulate_moments(kinds, n, replications, master_seed, workers)?;
            kinds
                .iter()
                .zip(&moments)
                .map(|(&kind, m)| summarize(kind, n, m, master_seed))
                .collect()
        })
        .collect()
}

fn summarize(kind: EstimatorKind, n: usize, m: &Moments, seed: u64) -> Result<SimulationResult> {
    let scale = normalizer(kind, n)?;
    let variance = m.variance();
    let variance_se = m.variance_standard_error();
    Ok(SimulationResult {
        n,
        estimator: kind,
        mean_estimate: m.mean,
        bias: m.mean - truth(kind),
        variance_estimate: variance,
        mc_standard_error: m.mean_standard_error(),
        variance_standard_error: variance_se,
        normalized_variance: variance * scale,
        normalized_standard_error: variance_se * scale,
        replications: m.count,
        seed,
    })
}

/// Moments of each estimator over `replications` samples of size `n`.
pub fn simulate_moments(
    kinds: &[EstimatorKind],
    n: usize,
    replications: u64,
    master_seed: u64,
    workers: Workers,
) -> Result<Vec<Moments>> {
    if kinds.is_empty() {
        return Err(Error::InvalidConfig("no estimators given".into()));
    }
    if replications < MIN_REPLICATIONS {
        return Err(Error::InvalidConfig(format!(
            "need at least {MIN_REPLICATIONS} replications, got {replications}"
        )));
    }
    for &kind in kinds {
        match kind {
            EstimatorKind::Hl1 | EstimatorKind::Hl2 | EstimatorKind::Hl3 | EstimatorKind::Shamos => {
                check_pairwise(kind, n)?
            }
            _ => kind.check_n(n)?,
        }
    }
    let chunks = par_chunks(replications, workers, |range| {
        let mut acc = vec![Moments::new(); kinds.len()];
        let mut scratch = Scratch::new();
        let mut xs = vec![0.0; n];
        for r in range {
            Substream::new(master_seed, n as u64, r).fill_normal(&mut xs);
            for (m, &kind) in acc.iter_mut().zip(kinds) {
                m.push(scratch.evaluate(kind, &xs));
            }
        }
        acc
    })?;
    Ok(merge_ordered(chunks, kinds.len()))
}

/// Maps `f` over consecutive replication ranges in a pool of the requested
/// size; results come back in range order.
pub(crate) fn par_chunks<T, F>(replications: u64, workers: Workers, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync,
{
    let threads = workers.resolve()?;
    let count = replications.div_ceil(CHUNK);
    let run = || {
        (0..count)
            .into_par_iter()
            .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(replications)))
            .collect()
    };
    if threads == 1 {
        return Ok((0..count)
            .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(replications)))
            .collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(run))
}

pub(crate) fn merge_ordered(chunks: Vec<Vec<Moments>>, width: usize) -> Vec<Moments> {
    chunks.iter().fold(vec![Moments::new(); width], |acc, chunk| {
        acc.iter().zip(chunk).map(|(a, b)| a.merge(b)).collect()
    })
}
