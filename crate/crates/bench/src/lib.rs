//! Timing harness for the five complementary-partition algorithms.
//!
//! Each row instantiates an integer partition as a set partition filled with
//! consecutive integers, checks that every algorithm returns the same set,
//! and reports per-algorithm median wall times.

use std::fmt;
use std::time::{Duration, Instant};

use gencum_core::csp::complementary;
use gencum_core::{bell, Algorithm, IntegerPartition, SetPartition};
use serde::Serialize;

/// Upper bound on `n` for a bench row.
pub const MAX_BENCH_N: usize = 10;
/// Warm-up runs per algorithm and row, excluded from the medians.
pub const WARMUP: usize = 1;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("need at least 3 repetitions, got {0}")]
    TooFewReps(usize),
    #[error("type {ty} has n = {n}, above the bench limit of {MAX_BENCH_N}")]
    TooLarge { ty: IntegerPartition, n: usize },
    #[error("{algorithm} disagrees with twoblock on {instance}")]
    Disagreement { instance: SetPartition, algorithm: Algorithm },
    #[error(transparent)]
    Core(#[from] gencum_core::Error),
}

/// Block types of the timing table, smallest `n` first. The two `n = 10`
/// rows are opt-in.
pub fn table1_types(include_n10: bool) -> Vec<IntegerPartition> {
    let mut rows: Vec<&[usize]> = vec![
        &[1, 1, 2, 2],
        &[2, 2, 2],
        &[2, 2, 3],
        &[3, 4],
        &[1, 1, 2, 2, 2],
        &[1, 3, 4],
        &[1, 2, 2, 4],
        &[2, 3, 4],
    ];
    if include_n10 {
        rows.push(&[2, 2, 2, 2, 2]);
        rows.push(&[2, 2, 3, 3]);
    }
    rows.into_iter()
        .map(|p| IntegerPartition::new(p.to_vec()).expect("static types are valid"))
        .collect()
}

/// Parses `"2,2,3;3,4"` into block types.
pub fn parse_types(s: &str) -> gencum_core::Result<Vec<IntegerPartition>> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub twoblock: f64,
    pub graph: f64,
    pub laplacian: f64,
    pub nullspace: f64,
    pub stafford: f64,
}

impl Timings {
    pub fn get(&self, a: Algorithm) -> f64 {
        match a {
            Algorithm::Twoblock => self.twoblock,
            Algorithm::Graph => self.graph,
            Algorithm::Laplacian => self.laplacian,
            Algorithm::Nullspace => self.nullspace,
            Algorithm::Stafford => self.stafford,
        }
    }

    fn from_fn(mut f: impl FnMut(Algorithm) -> f64) -> Self {
        Timings {
            twoblock: f(Algorithm::Twoblock),
            graph: f(Algorithm::Graph),
            laplacian: f(Algorithm::Laplacian),
            nullspace: f(Algorithm::Nullspace),
            stafford: f(Algorithm::Stafford),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub complementary: u64,
    pub not_complementary: u64,
    pub total: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    #[serde(rename = "type")]
    pub block_type: IntegerPartition,
    pub instance: SetPartition,
    pub counts: Counts,
    pub median_ms: Timings,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BenchConfig {
    pub reps: usize,
    pub warmup: usize,
    pub clock_resolution_ns: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub config: BenchConfig,
}

/// Smallest nonzero step observed on the monotonic clock.
pub fn clock_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..64 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min(b - a);
    }
    best
}

fn median(xs: &mut [Duration]) -> Duration {
    xs.sort_unstable();
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2
    }
}

fn timed(p: &SetPartition, a: Algorithm, floor: Duration) -> gencum_core::Result<(Vec<SetPartition>, Duration)> {
    let start = Instant::now();
    let out = complementary(p, a)?;
    Ok((out, start.elapsed().max(floor)))
}

/// Benchmarks one row; the warm-up results double as the agreement check.
pub fn bench_row(ty: &IntegerPartition, reps: usize, floor: Duration) -> Result<BenchRow, BenchError> {
    let n = ty.n();
    if n > MAX_BENCH_N {
        return Err(BenchError::TooLarge { ty: ty.clone(), n });
    }
    let instance = ty.consecutive_partition()?;
    let (reference, _) = timed(&instance, Algorithm::Twoblock, floor)?;
    for a in &Algorithm::ALL[1..] {
        for _ in 0..WARMUP {
            let (got, _) = timed(&instance, *a, floor)?;
            if got != reference {
                return Err(BenchError::Disagreement {
                    instance,
                    algorithm: *a,
                });
            }
        }
    }
    let mut samples: Vec<Vec<Duration>> = vec![Vec::with_capacity(reps); Algorithm::ALL.len()];
    for _ in 0..reps {
        for (k, a) in Algorithm::ALL.into_iter().enumerate() {
            let (got, t) = timed(&instance, a, floor)?;
            if got.len() != reference.len() {
                return Err(BenchError::Disagreement { instance, algorithm: a });
            }
            samples[k].push(t);
        }
    }
    let medians: Vec<f64> = samples.iter_mut().map(|s| median(s).as_secs_f64() * 1e3).collect();
    let total: u64 = bell(n).try_into().expect("bell(10) fits in u64");
    let c = reference.len() as u64;
    Ok(BenchRow {
        block_type: ty.clone(),
        instance,
        counts: Counts {
            complementary: c,
            not_complementary: total - c,
            total,
        },
        median_ms: Timings::from_fn(|a| medians[a as usize]),
    })
}

/// Runs every row in order; `reps` timed runs per algorithm after one warm-up.
pub fn run_bench(types: &[IntegerPartition], reps: usize) -> Result<BenchReport, BenchError> {
    if reps < 3 {
        return Err(BenchError::TooFewReps(reps));
    }
    if let Some(ty) = types.iter().find(|t| t.n() > MAX_BENCH_N) {
        return Err(BenchError::TooLarge { ty: ty.clone(), n: ty.n() });
    }
    let res = clock_resolution();
    let floor = res.max(Duration::from_nanos(1));
    let rows = types.iter().map(|t| bench_row(t, reps, floor)).collect::<Result<_, _>>()?;
    Ok(BenchReport {
        rows,
        config: BenchConfig {
            reps,
            warmup: WARMUP,
            clock_resolution_ns: res.as_nanos() as u64,
        },
    })
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<14} {:>7} {:>7}", "type", "csp", "total")?;
        for a in Algorithm::ALL {
            write!(f, " {:>11}", a.name())?;
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(
                f,
                "{:<14} {:>7} {:>7}",
                row.block_type.to_string(),
                row.counts.complementary,
                row.counts.total
            )?;
            for a in Algorithm::ALL {
                write!(f, " {:>11.3}", row.median_ms.get(a))?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "median ms over {} reps, {} warm-up, clock resolution {} ns",
            self.config.reps, self.config.warmup, self.config.clock_resolution_ns
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_type_lists() {
        let t = parse_types("2,2,3; 3,4").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].parts(), &[3, 2, 2]);
        assert!(parse_types("2,x").is_err());
    }

    #[test]
    fn table_types() {
        let t = table1_types(false);
        assert_eq!(t.len(), 8);
        assert!(t.iter().all(|t| t.n() <= 9));
        assert_eq!(table1_types(true).len(), 10);
    }

    #[test]
    fn median_of_even_and_odd() {
        let ms = |v: &[u64]| v.iter().map(|&x| Duration::from_millis(x)).collect::<Vec<_>>();
        assert_eq!(median(&mut ms(&[3, 1, 2])), Duration::from_millis(2));
        assert_eq!(median(&mut ms(&[4, 1, 2, 3])), Duration::from_micros(2500));
    }

    #[test]
    fn rejects_bad_config() {
        let t = table1_types(false);
        assert!(matches!(run_bench(&t, 2), Err(BenchError::TooFewReps(2))));
        let big = IntegerPartition::new(vec![11]).unwrap();
        assert!(matches!(run_bench(&[big], 3), Err(BenchError::TooLarge { n: 11, .. })));
    }
}
