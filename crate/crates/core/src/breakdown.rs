//! Finite-sample replacement breakdown points.
//!
//! ε_n is the largest fraction k/n of observations that can be replaced by
//! arbitrary values while the estimate stays bounded. Each estimator here is
//! a median over some multiset of size N, so it survives as long as at most
//! ⌊(N − 1)/2⌋ of those elements are unbounded; the closed forms solve that
//! inequality for k.
//!
//! Closed forms are evaluated in integer arithmetic. For an integer K and a
//! nonnegative integer M, ⌊(K − √M)/2⌋ = ⌊(K − ⌈√M⌉)/2⌋, which removes any
//! floating-point doubt about the outer floor.

use std::fmt;

use crate::error::{Error, Result};
use crate::sample::EstimatorKind;

/// k*/n stored as the integer pair, with the real value derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BreakdownResult {
    pub n: usize,
    pub estimator: EstimatorKind,
    pub k_star: usize,
}

impl BreakdownResult {
    pub fn epsilon(&self) -> f64 {
        self.k_star as f64 / self.n as f64
    }
}

impl fmt::Display for BreakdownResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.7}", self.epsilon())
    }
}

/// Breakdown families: estimators in the same family share ε_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// median and MAD
    Median,
    /// HL1 and Shamos
    Hl1,
    Hl2,
    Hl3,
    /// mean and standard deviation: a single replaced value breaks them
    Zero,
}

impl Family {
    pub fn of(kind: EstimatorKind) -> Self {
        match kind {
            EstimatorKind::Median | EstimatorKind::Mad => Self::Median,
            EstimatorKind::Hl1 | EstimatorKind::Shamos => Self::Hl1,
            EstimatorKind::Hl2 => Self::Hl2,
            EstimatorKind::Hl3 => Self::Hl3,
            EstimatorKind::Mean | EstimatorKind::StdDev => Self::Zero,
        }
    }
}

fn ceil_sqrt(m: u128) -> u128 {
    let s = isqrt(m);
    if s * s == m {
        s
    } else {
        s + 1
    }
}

fn isqrt(m: u128) -> u128 {
    if m < 2 {
        return m;
    }
    // float seed, then exact correction
    let mut s = (m as f64).sqrt() as u128;
    while s * s > m {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= m {
        s += 1;
    }
    s
}

/// ⌊(k_num − √m)/2⌋ for k_num ≥ √m.
fn half_floor_minus_sqrt(k_num: u128, m: u128) -> usize {
    ((k_num - ceil_sqrt(m)) / 2) as usize
}

fn check(kind: EstimatorKind, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig("breakdown needs n >= 1".into()));
    }
    kind.check_n(n)
}

fn result(estimator: EstimatorKind, n: usize, k_star: usize) -> BreakdownResult {
    BreakdownResult {
        n,
        estimator,
        k_star,
    }
}

/// ε_n = ⌊(n − 1)/2⌋ / n. Also the MAD's breakdown point.
pub fn breakdown_median(n: usize) -> Result<BreakdownResult> {
    check(EstimatorKind::Median, n)?;
    Ok(result(EstimatorKind::Median, n, (n - 1) / 2))
}

/// ε_n = ⌊n − √(n² − ⌊(n² − 1)/2⌋)⌋ / n.
pub fn breakdown_hl3(n: usize) -> Result<BreakdownResult> {
    check(EstimatorKind::Hl3, n)?;
    let nn = n as u128;
    let m = nn * nn - (nn * nn - 1) / 2;
    // n − √m = (2n − √(4m))/2
    Ok(result(EstimatorKind::Hl3, n, half_floor_minus_sqrt(2 * nn, 4 * m)))
}

/// ε_n = ⌊n − ½ − √((n − ½)² − 2⌊(n² − n − 2)/4⌋)⌋ / n. Also Shamos.
pub fn breakdown_hl1(n: usize) -> Result<BreakdownResult> {
    check(EstimatorKind::Hl1, n)?;
    let nn = n as u128;
    let f = (nn * nn - nn - 2) / 4;
    // 4·((n − ½)² − 2f) = 4n² − 4n + 1 − 8f
    let m = 4 * nn * nn - 4 * nn + 1 - 8 * f;
    Ok(result(EstimatorKind::Hl1, n, half_floor_minus_sqrt(2 * nn - 1, m)))
}

/// ε_n = ⌊n + ½ − √((n + ½)² − 2⌊(n² + n − 2)/4⌋)⌋ / n.
pub fn breakdown_hl2(n: usize) -> Result<BreakdownResult> {
    check(EstimatorKind::Hl2, n)?;
    let nn = n as u128;
    let f = (nn * nn + nn - 2) / 4;
    let m = 4 * nn * nn + 4 * nn + 1 - 8 * f;
    Ok(result(EstimatorKind::Hl2, n, half_floor_minus_sqrt(2 * nn + 1, m)))
}

/// Closed-form breakdown point for any estimator.
pub fn breakdown(n: usize, estimator: EstimatorKind) -> Result<BreakdownResult> {
    check(estimator, n)?;
    let k_star = match Family::of(estimator) {
        Family::Median => breakdown_median(n)?.k_star,
        Family::Hl1 => breakdown_hl1(n)?.k_star,
        Family::Hl2 => breakdown_hl2(n)?.k_star,
        Family::Hl3 => breakdown_hl3(n)?.k_star,
        Family::Zero => 0,
    };
    Ok(result(estimator, n, k_star))
}

/// Brute-force k* by scanning k = 0..=n and counting how many elements of
/// the underlying multiset a k-point replacement can drive to infinity.
pub fn breakdown_oracle(n: usize, estimator: EstimatorKind) -> Result<BreakdownResult> {
    check(estimator, n)?;
    let n64 = n as u64;
    // (multiset size, number of elements untouched by k replacements)
    let counts = |k: u64| -> (u64, u64) {
        let clean = n64 - k;
        match Family::of(estimator) {
            Family::Median => (n64, clean),
            Family::Hl1 => (n64 * (n64 - 1) / 2, clean * clean.saturating_sub(1) / 2),
            Family::Hl2 => (n64 * (n64 + 1) / 2, clean * (clean + 1) / 2),
            Family::Hl3 => (n64 * n64, clean * clean),
            // a sum over all observations: any replacement is unbounded
            Family::Zero => (1, if k == 0 { 1 } else { 0 }),
        }
    };
    let mut k_star = 0;
    for k in 0..=n64 {
        let (total, clean) = counts(k);
        let corrupted = total - clean;
        if corrupted <= (total - 1) / 2 {
            k_star = k as usize;
        }
    }
    Ok(result(estimator, n, k_star))
}

/// One row of the breakdown table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BreakdownRow {
    pub n: usize,
    pub median_mad: BreakdownResult,
    pub hl1_shamos: BreakdownResult,
    pub hl2: BreakdownResult,
    pub hl3: BreakdownResult,
}

/// Rows n = 2..=n_max.
pub fn breakdown_table(n_max: usize) -> Result<Vec<BreakdownRow>> {
    if n_max < 2 {
        return Err(Error::InvalidConfig(format!(
            "breakdown table needs n_max >= 2, got {n_max}"
        )));
    }
    (2..=n_max)
        .map(|n| {
            Ok(BreakdownRow {
                n,
                median_mad: breakdown_median(n)?,
                hl1_shamos: breakdown_hl1(n)?,
                hl2: breakdown_hl2(n)?,
                hl3: breakdown_hl3(n)?,
            })
        })
        .collect()
}

pub const TABLE_HEADER: &str = "n,median_mad,hl1_shamos,hl2,hl3";

/// CSV body in the appendix layout: 7 decimals, header first.
pub fn table_csv(rows: &[BreakdownRow]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n, r.median_mad, r.hl1_shamos, r.hl2, r.hl3
        ));
    }
    out
}
