//! Regeneration of the embedded reference tables from fresh simulations.

use std::fmt::Write as _;
use std::str::FromStr;

use super::engine::{simulate_moments, Workers};
use crate::error::{Error, Result};
use crate::sample::EstimatorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableId {
    /// A_n, B_n
    Bias,
    /// normalized variances
    NVar,
    /// relative efficiencies
    Re,
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bias" => Ok(Self::Bias),
            "nvar" | "variance" => Ok(Self::NVar),
            "re" | "efficiency" => Ok(Self::Re),
            other => Err(Error::InvalidConfig(format!("unknown table '{other}'"))),
        }
    }
}

impl TableId {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Self::Bias => &["A_n", "B_n"],
            Self::NVar => &["median", "hl1", "hl2", "hl3", "mad_ratio", "shamos_ratio"],
            Self::Re => &["median", "hl1", "hl2", "hl3", "mad", "shamos"],
        }
    }

    fn estimators(self) -> &'static [EstimatorKind] {
        use EstimatorKind::*;
        match self {
            Self::Bias => &[Mad, Shamos],
            Self::NVar | Self::Re => &[Median, Hl1, Hl2, Hl3, Mad, Shamos],
        }
    }

    /// The n range of the embedded table.
    pub fn default_n_values(self) -> Vec<usize> {
        match self {
            Self::Bias => (2..=100).collect(),
            Self::NVar | Self::Re => (1..=100).collect(),
        }
    }

    fn decimals(self) -> usize {
        match self {
            Self::Bias => 7,
            Self::NVar | Self::Re => 4,
        }
    }
}

/// One cell: estimate and Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub value: f64,
    pub mc_se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegeneratedTable {
    pub id: TableId,
    pub rows: Vec<(usize, Vec<Option<Cell>>)>,
    pub replications: u64,
    pub seed: u64,
}

impl RegeneratedTable {
    /// Column layout of the embedded table followed by one `<column>_mc_se`
    /// per estimate; `NA` where an estimator is undefined.
    pub fn to_csv(&self) -> String {
        let cols = self.id.columns();
        let mut out = String::from("n");
        for c in cols {
            write!(out, ",{c}").unwrap();
        }
        for c in cols {
            write!(out, ",{c}_mc_se").unwrap();
        }
        out.push('\n');
        let d = self.id.decimals();
        for (n, cells) in &self.rows {
            write!(out, "{n}").unwrap();
            for c in cells {
                match c {
                    Some(c) => write!(out, ",{:.d$}", c.value).unwrap(),
                    None => out.push_str(",NA"),
                }
            }
            for c in cells {
                match c {
                    Some(c) => write!(out, ",{:.7}", c.mc_se).unwrap(),
                    None => out.push_str(",NA"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Simulates every cell of `id` at the given sample sizes (the embedded
/// table's range when empty). Bias and normalized-variance cells carry their
/// own standard errors. RE cells are Var(baseline)/Var(estimator) on shared
/// samples, with the baseline the mean for location and S_n for scale; their
/// standard error treats the two variance errors as independent.
pub fn regenerate_table(
    id: TableId,
    n_values: &[usize],
    replications: u64,
    master_seed: u64,
    workers: Workers,
) -> Result<RegeneratedTable> {
    let n_values = if n_values.is_empty() {
        id.default_n_values()
    } else {
        n_values.to_vec()
    };
    let mut rows = Vec::with_capacity(n_values.len());
    for n in n_values {
        let mut kinds: Vec<EstimatorKind> = id
            .estimators()
            .iter()
            .copied()
            .filter(|k| n >= k.min_n())
            .collect();
        if kinds.is_empty() {
            return Err(Error::TooSmall {
                estimator: id.estimators()[0],
                n,
                min: 2,
            });
        }
        let baselines = [EstimatorKind::Mean, EstimatorKind::StdDev];
        if id == TableId::Re {
            kinds.extend(baselines.iter().filter(|k| n >= k.min_n()));
        }
        let moments = simulate_moments(&kinds, n, replications, master_seed, workers)?;
        let lookup = |k: EstimatorKind| kinds.iter().position(|&x| x == k).map(|i| &moments[i]);
        let cells = id
            .estimators()
            .iter()
            .map(|&kind| {
                let m = lookup(kind)?;
                Some(match id {
                    TableId::Bias => Cell {
                        value: m.mean - super::engine::truth(kind),
                        mc_se: m.mean_standard_error(),
                    },
                    TableId::NVar => {
                        let s = super::engine::normalizer(kind, n).ok()?;
                        Cell {
                            value: m.variance() * s,
                            mc_se: m.variance_standard_error() * s,
                        }
                    }
                    TableId::Re => {
                        let base = lookup(if kind.is_location() {
                            EstimatorKind::Mean
                        } else {
                            EstimatorKind::StdDev
                        })?;
                        let (vb, ve) = (base.variance(), m.variance());
                        let re = vb / ve;
                        let rel_b = base.variance_standard_error() / vb;
                        let rel_e = m.variance_standard_error() / ve;
                        Cell {
                            value: re,
                            mc_se: re * (rel_b * rel_b + rel_e * rel_e).sqrt(),
                        }
                    }
                })
            })
            .collect();
        rows.push((n, cells));
    }
    Ok(RegeneratedTable {
        id,
        rows,
        replications,
        seed: master_seed,
    })
}
