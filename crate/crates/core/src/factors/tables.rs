//! Embedded Monte Carlo reference tables (10⁷ replications each).
//!
//! The CSV files under `data/` are the golden copies; they are parsed once
//! and validated for header, row count and strictly increasing `n`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const BIAS_TABLE_CSV: &str = include_str!("../../data/bias_table.csv");
pub const BIAS_LARGE_TABLE_CSV: &str = include_str!("../../data/bias_large_table.csv");
pub const NVAR_TABLE_CSV: &str = include_str!("../../data/nvar_table.csv");
pub const NVAR_LARGE_TABLE_CSV: &str = include_str!("../../data/nvar_large_table.csv");
pub const RE_TABLE_CSV: &str = include_str!("../../data/re_table.csv");
pub const BREAKDOWN_TABLE_CSV: &str = include_str!("../../data/breakdown_table.csv");

/// A parsed numeric table: one row per `n`, `None` where the source says NA.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<(usize, Vec<Option<f64>>)>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (header_line, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let mut cols = header.split(',').map(str::trim);
        if cols.next() != Some("n") {
            return Err(Error::Parse {
                line: header_line,
                message: "first column must be n".into(),
            });
        }
        let columns: Vec<String> = cols.map(String::from).collect();
        let mut rows: Vec<(usize, Vec<Option<f64>>)> = Vec::new();
        for (line, l) in lines {
            let fields: Vec<&str> = l.split(',').map(str::trim).collect();
            if fields.len() != columns.len() + 1 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, got {}", columns.len() + 1, fields.len()),
                });
            }
            let n: usize = fields[0].parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad n '{}'", fields[0]),
            })?;
            if let Some((prev, _)) = rows.last() {
                if n <= *prev {
                    return Err(Error::Parse {
                        line,
                        message: format!("n must increase ({n} after {prev})"),
                    });
                }
            }
            let values = fields[1..]
                .iter()
                .map(|f| {
                    if f.eq_ignore_ascii_case("NA") {
                        Ok(None)
                    } else {
                        f.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                            line,
                            message: format!("bad value '{f}'"),
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((n, values));
        }
        Ok(Self { columns, rows })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn get(&self, n: usize, column: usize) -> Option<f64> {
        self.rows
            .binary_search_by_key(&n, |(k, _)| *k)
            .ok()
            .and_then(|i| self.rows[i].1[column])
    }

    /// All `(n, value)` pairs of a column, skipping NA cells.
    pub fn series(&self, column: usize) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter_map(|(n, v)| v[column].map(|x| (*n, x)))
            .collect()
    }

    fn validated(self, columns: &[&str], first: usize, count: usize) -> Self {
        assert_eq!(self.columns, columns, "embedded table columns");
        assert_eq!(self.rows.len(), count, "embedded table row count");
        assert_eq!(self.rows[0].0, first, "embedded table first n");
        self
    }
}

pub const NVAR_COLUMNS: [&str; 6] = ["median", "hl1", "hl2", "hl3", "mad_ratio", "shamos_ratio"];

macro_rules! embedded {
    ($fn:ident, $csv:ident, $cols:expr, $first:expr, $count:expr) => {
        pub fn $fn() -> &'static Table {
            static T: OnceLock<Table> = OnceLock::new();
            T.get_or_init(|| {
                Table::parse($csv)
                    .expect(concat!(stringify!($csv), " is well-formed"))
                    .validated(&$cols, $first, $count)
            })
        }
    };
}

embedded!(bias_table, BIAS_TABLE_CSV, ["A_n", "B_n"], 2, 99);
embedded!(
    bias_large_table,
    BIAS_LARGE_TABLE_CSV,
    ["A_n", "A_n_hayes", "A_n_williams", "B_n", "B_n_hayes", "B_n_williams"],
    109,
    32
);
embedded!(nvar_table, NVAR_TABLE_CSV, NVAR_COLUMNS, 1, 100);
embedded!(nvar_large_table, NVAR_LARGE_TABLE_CSV, NVAR_COLUMNS, 109, 32);
embedded!(
    re_table,
    RE_TABLE_CSV,
    ["median", "hl1", "hl2", "hl3", "mad", "shamos"],
    1,
    100
);
embedded!(
    breakdown_table,
    BREAKDOWN_TABLE_CSV,
    ["median_mad", "hl1_shamos", "hl2", "hl3"],
    2,
    49
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_tables_load() {
        assert_eq!(bias_table().get(2, 0), Some(-0.1633880));
        assert_eq!(bias_table().get(3, 1), Some(0.2989400));
        assert_eq!(bias_table().get(100, 0), Some(-0.0077614));
        assert_eq!(nvar_table().get(1, 1), None);
        assert_eq!(nvar_table().get(2, 4), Some(1.1000));
        assert_eq!(re_table().get(10, 0), Some(0.7229));
        assert_eq!(bias_large_table().rows.last().unwrap().0, 500);
        assert_eq!(nvar_large_table().get(200, 3), Some(1.0486));
        assert_eq!(breakdown_table().get(7, 2), Some(0.2857143));
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(Table::parse("x,a\n1,2\n").is_err());
        assert!(Table::parse("n,a\n2,1\n2,1\n").is_err());
        assert!(Table::parse("n,a\n1,2,3\n").is_err());
        assert!(matches!(
            Table::parse("n,a\n1,oops\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Table::parse("# only a comment\n").is_err());
    }

    #[test]
    fn bias_signs() {
        for (_, row) in &bias_table().rows {
            assert!(row[0].unwrap() < 0.0);
            assert!(row[1].unwrap() > 0.0);
        }
    }
}
