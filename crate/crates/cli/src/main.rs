//! `robust-finite`: robust estimation, breakdown tables, unbiasing factors,
//! Monte Carlo calibration, model fitting and an SPC demo.

mod input;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use robust_finite::breakdown::{breakdown_table, table_csv};
use robust_finite::calibration::fit::{fit, FitInput};
use robust_finite::calibration::{regenerate_table, simulate_many, TableId, Workers};
use robust_finite::factors::{self, factor_set_with, ModelForm};
use robust_finite::spc::{
    chart_limits, contamination_experiment, experiment_csv, ChartMethod, ContaminationConfig,
    SubgroupSeries,
};
use robust_finite::{estimate, EstimatorKind, Sample};

#[derive(Parser, Debug)]
#[command(name = "robust-finite", version, about = "Robust location/scale estimation with finite-sample corrections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate location or scale from one observation per line
    Estimate {
        /// Estimator(s), comma separated; all applicable ones if omitted
        #[arg(long, value_delimiter = ',')]
        estimator: Vec<EstimatorKind>,
        /// Divide sd, mad and shamos by c4, c5 and c6
        #[arg(long)]
        unbiased: bool,
        /// Input CSV, or - for stdin
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-sample breakdown points for n = n-min..n-max
    Breakdown {
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unbiasing and variance factors
    Factors {
        /// Sample sizes: a:b, a:b:step or a comma list
        #[arg(long, value_parser = input::parse_n_values)]
        n: std::vec::Vec<usize>,
        /// Bias model used beyond the tables
        #[arg(long, default_value = "hayes")]
        model: ModelForm,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo bias and variance under N(0, 1)
    Simulate {
        #[arg(long, required_unless_present = "table")]
        estimator: Option<EstimatorKind>,
        /// Sample sizes: a:b, a:b:step or a comma list
        #[arg(long, value_parser = input::parse_n_values, required_unless_present = "table")]
        n: Option<std::vec::Vec<usize>>,
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
        #[arg(long)]
        seed: u64,
        /// Worker threads or "auto"
        #[arg(long, default_value = "auto")]
        workers: Workers,
        /// Regenerate a whole reference table instead
        #[arg(long, conflicts_with = "estimator")]
        table: Option<TableId>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least-squares fit of a bias model to a CSV column
    Fit {
        #[arg(long)]
        model: ModelForm,
        #[arg(long)]
        input: PathBuf,
        /// A, B, or a column name
        #[arg(long)]
        target: String,
        /// Use only rows with n >= this
        #[arg(long, default_value_t = 0)]
        n_min: usize,
        /// Subtracted from every value before fitting (e.g. an asymptote)
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        offset: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contamination experiment, or chart limits from subgroup data
    SpcDemo {
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, value_parser = input::parse_deltas, default_value = "0,10,20,30,40,50")]
        delta: std::vec::Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long, required_unless_present = "input")]
        seed: Option<u64>,
        /// Observations shifted by delta, from the first of subgroup 1
        #[arg(long, default_value_t = 1)]
        corrupted: usize,
        #[arg(long, default_value = "auto")]
        workers: Workers,
        /// Subgroup CSV (one subgroup per line); prints chart limits instead
        #[arg(long)]
        input: Option<PathBuf>,
        /// With --input: new subgroups to check against the limits
        #[arg(long, requires = "input")]
        phase2: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn metadata() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!("# robust-finite {} {}\n", env!("CARGO_PKG_VERSION"), args.join(" "))
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    let text = metadata() + body;
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_estimate(kinds: Vec<EstimatorKind>, unbiased: bool, path: &Path) -> Result<String> {
    let values = input::observations(path)?;
    let sample = Sample::new(values).with_context(|| format!("{}", path.display()))?;
    let n = sample.len();
    let explicit = !kinds.is_empty();
    let kinds = if explicit {
        kinds
    } else {
        EstimatorKind::ALL.iter().copied().filter(|k| n >= k.min_n()).collect()
    };
    let mut body = String::from("estimator,unbiased,n,value\n");
    for kind in kinds {
        let raw = estimate(&sample, kind)?;
        let (value, corrected) = match (unbiased, kind) {
            (true, EstimatorKind::StdDev) => (raw / factors::c4(n)?, true),
            (true, EstimatorKind::Mad) => (raw / factors::c5(n)?, true),
            (true, EstimatorKind::Shamos) => (raw / factors::c6(n)?, true),
            (true, k) if explicit && k.is_location() => {
                bail!("--unbiased applies to sd, mad and shamos, not {k}")
            }
            _ => (raw, false),
        };
        writeln!(body, "{kind},{corrected},{n},{value}")?;
    }
    Ok(body)
}

fn run_factors(ns: &[usize], model: ModelForm) -> Result<String> {
    let mut body = String::from("n,c4,c5,c6,v5,v6,source,bp_median_mad,bp_hl1_shamos,bp_hl2,bp_hl3\n");
    for &n in ns {
        let f = factor_set_with(n, model)?;
        let b = f.breakdown;
        writeln!(
            body,
            "{},{:.7},{:.7},{:.7},{:.7},{:.7},{},{:.7},{:.7},{:.7},{:.7}",
            n, f.c4, f.c5, f.c6, f.v5, f.v6, f.source, b.median_mad, b.hl1_shamos, b.hl2, b.hl3
        )?;
    }
    Ok(body)
}

pub const SIMULATE_HEADER: &str = "n,estimate,bias,variance,normalized,mc_se,reps,seed";

fn run_simulate(kind: EstimatorKind, ns: &[usize], reps: u64, seed: u64, workers: Workers) -> Result<String> {
    let rows = simulate_many(&[kind], ns, reps, seed, workers)?;
    let mut body = format!("{SIMULATE_HEADER}\n");
    for r in rows.iter().flatten() {
        writeln!(
            body,
            "{},{:.7},{:.7},{:.7},{:.4},{:.7},{},{}",
            r.n,
            r.mean_estimate,
            r.bias,
            r.variance_estimate,
            r.normalized_variance,
            r.mc_standard_error,
            r.replications,
            r.seed
        )?;
    }
    Ok(body)
}

fn run_fit(model: ModelForm, path: &Path, target: &str, n_min: usize, offset: f64) -> Result<String> {
    let candidates: Vec<&str> = match target {
        "A" => vec!["A_n", "bias"],
        "B" => vec!["B_n", "bias"],
        other => vec![other],
    };
    let (column, pairs) = input::column_pairs(path, &candidates)?;
    let points: Vec<(f64, f64)> = pairs
        .into_iter()
        .filter(|&(n, _)| n >= n_min as f64)
        .map(|(n, v)| (n, v - offset))
        .collect();
    let count = points.len();
    let m = fit(model, &FitInput::new(points)).with_context(|| format!("fitting column '{column}'"))?;
    let names = match model {
        ModelForm::Hayes => "p,q",
        ModelForm::Williams => "amp,exponent",
    };
    Ok(format!(
        "model,target,{names},rss,points\n{model},{column},{:.9},{:.9},{:e},{count}\n",
        m.coefficients[0], m.coefficients[1], m.rss
    ))
}

fn run_limits(path: &Path, phase2: Option<&Path>) -> Result<String> {
    let series = SubgroupSeries::new(input::subgroups(path)?).with_context(|| format!("{}", path.display()))?;
    let mut body = String::from("method,center,lcl,ucl,three_sigma,k,n\n");
    let mut limits = Vec::new();
    for method in ChartMethod::ALL {
        let l = chart_limits(&series, method)?;
        writeln!(
            body,
            "{method},{},{},{},{},{},{}",
            l.center, l.lcl, l.ucl, l.three_sigma, series.k(), series.n()
        )?;
        limits.push(l);
    }
    if let Some(p2) = phase2 {
        body.push_str("subgroup,method,signal\n");
        for (i, row) in input::subgroups(p2)?.iter().enumerate() {
            for l in &limits {
                let signal = l
                    .classify(row)
                    .with_context(|| format!("{}: subgroup {}", p2.display(), i + 1))?;
                writeln!(body, "{},{},{signal}", i + 1, l.method)?;
            }
        }
    }
    Ok(body)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate {
            estimator,
            unbiased,
            input,
            out,
        } => emit(out.as_deref(), &run_estimate(estimator, unbiased, &input)?),
        Command::Breakdown { n_max, n_min, out } => {
            let rows: Vec<_> = breakdown_table(n_max)?.into_iter().filter(|r| r.n >= n_min).collect();
            emit(out.as_deref(), &table_csv(&rows))
        }
        Command::Factors { n, model, out } => emit(out.as_deref(), &run_factors(&n, model)?),
        Command::Simulate {
            estimator,
            n,
            reps,
            seed,
            workers,
            table,
            out,
        } => {
            let body = match (table, estimator) {
                (Some(id), _) => regenerate_table(id, n.as_deref().unwrap_or(&[]), reps, seed, workers)?.to_csv(),
                (None, Some(kind)) => run_simulate(kind, n.as_deref().unwrap_or(&[]), reps, seed, workers)?,
                (None, None) => unreachable!("clap requires --estimator or --table"),
            };
            emit(out.as_deref(), &body)
        }
        Command::Fit {
            model,
            input,
            target,
            n_min,
            offset,
            out,
        } => emit(out.as_deref(), &run_fit(model, &input, &target, n_min, offset)?),
        Command::SpcDemo {
            k,
            n,
            mu,
            sigma,
            delta,
            reps,
            seed,
            corrupted,
            workers,
            input,
            phase2,
            out,
        } => {
            let body = match (input, seed) {
                (Some(path), _) => run_limits(&path, phase2.as_deref())?,
                (None, Some(seed)) => {
                    let cfg = ContaminationConfig {
                        k,
                        n,
                        mu,
                        sigma,
                        deltas: delta,
                        replications: reps,
                        seed,
                        corrupted,
                        workers,
                    };
                    experiment_csv(&contamination_experiment(&cfg)?)
                }
                (None, None) => unreachable!("clap requires --seed without --input"),
            };
            emit(out.as_deref(), &body)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
