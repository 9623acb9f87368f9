//! `gencum` command-line front end. [`run`] is the whole program minus the
//! process boundary, so it can be driven from tests.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use gencum_bench::{parse_types, run_bench, table1_types, BenchError};
use gencum_core::cumulant::{generalized_cumulant_with, generalized_mv_cumulant, generalized_mv_cumulant_optimized};
use gencum_core::estimation::{estimator_gmc, ingest_csv};
use gencum_core::{csp, enumerate_partitions, Algorithm, CumulantPolynomial, MultiIndexPartition, SetPartition};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gencum", version, about = "Complementary set partitions, generalized cumulants and polykays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Form {
    Cr1,
    Cr2,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the partitions complementary to a set partition.
    Csp {
        /// Blocks separated by `|`, elements by `,` (or single digits).
        #[arg(short, long)]
        partition: SetPartition,
        #[arg(short, long, default_value = "twoblock")]
        algo: Algorithm,
        #[arg(long, value_enum, default_value = "cr2")]
        form: Form,
        #[arg(long)]
        json: bool,
    },
    /// Generalized cumulant of a set partition in joint cumulants.
    Gencum {
        #[arg(short, long)]
        partition: SetPartition,
        #[arg(short, long, default_value = "twoblock")]
        algo: Algorithm,
        #[arg(long)]
        json: bool,
    },
    /// Generalized multivariate cumulant of a multi-index partition.
    Gmc {
        /// Columns separated by `|`, entries by `,`, e.g. `1,0|0,2`.
        #[arg(short, long)]
        lambda: MultiIndexPartition,
        /// Group complementary partitions through the preimage coefficients.
        #[arg(long)]
        optimized: bool,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the unbiased estimator of a generalized multivariate cumulant on CSV data.
    Estimate {
        #[arg(short, long)]
        data: PathBuf,
        #[arg(short, long)]
        lambda: MultiIndexPartition,
        /// The first CSV row holds column names.
        #[arg(long)]
        header: bool,
        #[arg(long)]
        json: bool,
    },
    /// Time the five complementary-partition algorithms.
    Bench {
        /// Block types separated by `;`, e.g. `2,2,3;3,4`. Defaults to the timing table.
        #[arg(short, long)]
        types: Option<String>,
        #[arg(short, long, default_value_t = 5)]
        reps: usize,
        /// Add the two n = 10 rows to the default table.
        #[arg(long)]
        include_n10: bool,
        #[arg(long)]
        json: bool,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the set partitions of [n].
    Partitions {
        #[arg(short, long)]
        n: usize,
        /// Keep only partitions with this many blocks.
        #[arg(short, long)]
        blocks: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] gencum_core::Error),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    estimate: f64,
    expression: String,
    #[serde(rename = "N")]
    big_n: usize,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    names: Option<&'a [String]>,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn print_poly(out: &mut dyn Write, poly: &CumulantPolynomial, json: bool) -> Result<(), CliError> {
    if json {
        writeln!(out, "{}", serde_json::to_string(poly)?)?;
    } else {
        writeln!(out, "{poly}")?;
    }
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Csp {
            partition,
            algo,
            form,
            json,
        } => {
            let mut result = csp(&partition, algo)?;
            if let Form::Cr1 = form {
                for p in &mut result.complementary {
                    *p = p.to_cr1();
                }
            }
            if json {
                writeln!(out, "{}", serde_json::to_string(&result)?)?;
            } else {
                for p in &result.complementary {
                    writeln!(out, "{p}")?;
                }
            }
        }
        Command::Gencum { partition, algo, json } => {
            print_poly(out, &generalized_cumulant_with(&partition, algo)?, json)?;
        }
        Command::Gmc { lambda, optimized, json } => {
            let poly = if optimized {
                generalized_mv_cumulant_optimized(&lambda)?
            } else {
                generalized_mv_cumulant(&lambda)?
            };
            print_poly(out, &poly, json)?;
        }
        Command::Estimate {
            data,
            lambda,
            header,
            json,
        } => {
            let sample = ingest_csv(&data, header)?;
            let expr = estimator_gmc(&lambda)?;
            let estimate = expr.evaluate(&sample)?;
            if json {
                let report = EstimateOutput {
                    estimate,
                    expression: expr.to_string(),
                    big_n: sample.rows(),
                    n: sample.n(),
                    names: sample.names(),
                };
                writeln!(out, "{}", serde_json::to_string(&report)?)?;
            } else {
                writeln!(out, "{estimate}")?;
                writeln!(out, "{expr}")?;
            }
        }
        Command::Bench {
            types,
            reps,
            include_n10,
            json,
            out: path,
        } => {
            let types = match types {
                Some(s) => parse_types(&s)?,
                None => table1_types(include_n10),
            };
            let report = run_bench(&types, reps)?;
            let encoded = serde_json::to_string_pretty(&report)?;
            if let Some(path) = path {
                std::fs::write(path, format!("{encoded}\n"))?;
            }
            if json {
                writeln!(out, "{encoded}")?;
            } else {
                writeln!(out, "{report}")?;
            }
        }
        Command::Partitions { n, blocks, json } => {
            let all = enumerate_partitions(n, blocks)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&all)?)?;
            } else {
                for p in &all {
                    writeln!(out, "{p}")?;
                }
            }
        }
    }
    Ok(())
}
