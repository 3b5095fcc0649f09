//! CSV ingestion shared by the subcommands.

use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

/// File (or stdin for `-`). Blank and `#` comment lines become a bare `#`
/// so the reader still sees one record per physical line.
fn open(path: &Path) -> Result<String> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).context("cannot read stdin")?;
    } else {
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .with_context(|| format!("cannot read {}", path.display()))?;
    }
    Ok(text
        .lines()
        .map(|l| {
            let t = l.trim_start();
            if t.is_empty() || t.starts_with('#') { "#" } else { l }
        })
        .collect::<Vec<_>>()
        .join("\n"))
}

fn reader(text: String) -> csv::Reader<io::Cursor<String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(io::Cursor::new(text))
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn is_skipped(record: &csv::StringRecord) -> bool {
    record.get(0).is_some_and(|f| f.starts_with('#'))
}

/// Numeric rows of a headerless-or-headed CSV. A first row that does not
/// parse as numbers is taken as a header and skipped.
pub fn numeric_rows(path: &Path) -> Result<Vec<(u64, Vec<f64>)>> {
    let label = path.display().to_string();
    let mut rows = Vec::new();
    let mut first = true;
    for record in reader(open(path)?).records() {
        let record = record.with_context(|| format!("{label}: malformed CSV"))?;
        let line = line_of(&record);
        if is_skipped(&record) || record.iter().all(str::is_empty) {
            continue;
        }
        let is_first = std::mem::take(&mut first);
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(values) => {
                if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
                    bail!("{label}: line {line}: non-finite value {bad}");
                }
                rows.push((line, values));
            }
            Err(_) if is_first => continue,
            Err(_) => {
                let field = record.iter().find(|f| f.parse::<f64>().is_err()).unwrap_or("");
                bail!("{label}: line {line}: '{field}' is not a number");
            }
        }
    }
    if rows.is_empty() {
        bail!("{label}: no data rows");
    }
    Ok(rows)
}

/// One observation per line (first field).
pub fn observations(path: &Path) -> Result<Vec<f64>> {
    Ok(numeric_rows(path)?.into_iter().map(|(_, v)| v[0]).collect())
}

/// One subgroup per line; every line must have the same width.
pub fn subgroups(path: &Path) -> Result<Vec<Vec<f64>>> {
    let rows = numeric_rows(path)?;
    let width = rows[0].1.len();
    for (line, row) in &rows {
        if row.len() != width {
            bail!(
                "{}: line {line}: subgroup has {} values, expected {width}",
                path.display(),
                row.len()
            );
        }
    }
    Ok(rows.into_iter().map(|(_, v)| v).collect())
}

/// `(n, value)` pairs from the named columns of a headed CSV. `NA` cells
/// are skipped.
pub fn column_pairs(path: &Path, candidates: &[&str]) -> Result<(String, Vec<(f64, f64)>)> {
    let label = path.display().to_string();
    let mut records = reader(open(path)?)
        .into_records()
        .filter(|r| !r.as_ref().is_ok_and(is_skipped));
    let header = records
        .next()
        .ok_or_else(|| anyhow!("{label}: empty file"))?
        .with_context(|| format!("{label}: malformed CSV"))?;
    let find = |name: &str| header.iter().position(|h| h == name);
    let n_col = find("n").ok_or_else(|| anyhow!("{label}: no 'n' column in header"))?;
    let (name, col) = candidates
        .iter()
        .find_map(|c| find(c).map(|i| (c.to_string(), i)))
        .ok_or_else(|| anyhow!("{label}: none of the columns {candidates:?} found"))?;
    let mut pairs = Vec::new();
    for record in records {
        let record = record.with_context(|| format!("{label}: malformed CSV"))?;
        let line = line_of(&record);
        let get = |i: usize| {
            record
                .get(i)
                .ok_or_else(|| anyhow!("{label}: line {line}: missing column {}", i + 1))
        };
        let cell = get(col)?;
        if cell.eq_ignore_ascii_case("NA") {
            continue;
        }
        let n: f64 = get(n_col)?
            .parse()
            .map_err(|_| anyhow!("{label}: line {line}: bad n '{}'", record.get(n_col).unwrap_or("")))?;
        let v: f64 = cell
            .parse()
            .map_err(|_| anyhow!("{label}: line {line}: bad value '{cell}'"))?;
        pairs.push((n, v));
    }
    Ok((name, pairs))
}

/// Sample sizes written as `a:b`, `a:b:step`, or comma-separated values.
pub fn parse_n_values(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let nums: Vec<&str> = part.split(':').collect();
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad sample size '{s}'"));
        match nums.as_slice() {
            [one] => out.push(num(one)?),
            [a, b] | [a, b, _] => {
                let (a, b) = (num(a)?, num(b)?);
                let step = if nums.len() == 3 { num(nums[2])? } else { 1 };
                if step == 0 || a > b {
                    return Err(format!("bad range '{part}'"));
                }
                out.extend((a..=b).step_by(step));
            }
            _ => return Err(format!("bad range '{part}'")),
        }
    }
    if out.is_empty() {
        return Err("no sample sizes".into());
    }
    Ok(out)
}

pub fn parse_deltas(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .ok()
                .filter(|d| d.is_finite())
                .ok_or_else(|| format!("bad delta '{p}'"))
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| if v.is_empty() { Err("no deltas".into()) } else { Ok(v) })
}
