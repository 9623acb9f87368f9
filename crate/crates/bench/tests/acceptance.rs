//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances and sizes are fixed below.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gencum_bench::{run_bench, table1_types};
use gencum_core::csp::complementary;
use gencum_core::cumulant::{
    generalized_cumulant, generalized_cumulant_in_moments, generalized_mv_cumulant, generalized_mv_cumulant_optimized,
    moments_to_cumulants,
};
use gencum_core::estimation::{estimator_gmc, polykay};
use gencum_core::onevec::{phi_preimage, to_onevec};
use gencum_core::partition::is_complementary_oracle;
use gencum_core::{
    bell, count_not_complementary, d_coefficient, enumerate_multiindex_partitions, enumerate_partitions, Algorithm,
    CumulantPolynomial, LabelingRule, Monomial, MultiIndex, MultiIndexPartition, NPoly, PowerSumPolynomial,
    SampleMatrix, SetPartition,
};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const EXAMPLE_BUDGET: Duration = Duration::from_secs(1);
const AGREEMENT_BUDGET: Duration = Duration::from_secs(600);
const MV_BUDGET: Duration = Duration::from_secs(300);
const MC_BUDGET: Duration = Duration::from_secs(60);
const BENCH_BUDGET: Duration = Duration::from_secs(1800);
const MC_REPLICATES: usize = 10_000;
const MC_SAMPLE: usize = 50;
const MC_SEED: u64 = 0x5EED_2024;
const MC_MAX_Z: f64 = 3.0;
const BENCH_REPS: usize = 25;
const N9_MIN_SPEEDUP: f64 = 2.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < budget, || format!("took {t:.2?}, budget {budget:?}"))?;
    Ok(t)
}

fn parts(list: &[&str]) -> Vec<SetPartition> {
    let mut v: Vec<SetPartition> = list.iter().map(|s| s.parse().unwrap()).collect();
    v.sort();
    v
}

fn mi(s: &str) -> MultiIndex {
    s.parse().unwrap()
}

fn mono(labels: &[&str]) -> Monomial {
    Monomial::new(labels.iter().map(|s| mi(s)).collect())
}

fn kappa(terms: &[(i64, &[&str])]) -> CumulantPolynomial {
    let arity = mi(terms[0].1[0]).arity();
    CumulantPolynomial::from_terms(arity, terms.iter().map(|(c, f)| (mono(f), BigInt::from(*c))))
}

fn targets(max_arity: usize, max_order: u32) -> Vec<MultiIndex> {
    fn fill(arity: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if cur.len() == arity {
            if cur.iter().any(|&x| x > 0) {
                out.push(MultiIndex::new(cur.clone()));
            }
            return;
        }
        for x in 0..=left {
            cur.push(x);
            fill(arity, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for arity in 1..=max_arity {
        fill(arity, max_order, &mut Vec::new(), &mut out);
    }
    out
}

fn c1_examples() -> Outcome {
    let start = Instant::now();
    let cases = [
        (
            "1|234",
            parts(&["12|3|4", "13|2|4", "14|2|3", "123|4", "124|3", "12|34", "134|2", "13|24", "14|23", "1234"]),
        ),
        (
            "123|4",
            parts(&["1|24|3", "1|2|34", "14|2|3", "1|234", "124|3", "13|24", "134|2", "12|34", "14|23", "1234"]),
        ),
        ("1|23", parts(&["123", "13|2", "12|3"])),
    ];
    for (p, want) in &cases {
        let p: SetPartition = p.parse().unwrap();
        for a in Algorithm::ALL {
            let got = complementary(&p, a).map_err(|e| e.to_string())?;
            ensure(&got == want, || format!("{a} on {p}: {got:?}"))?;
        }
    }
    let t = within(start, EXAMPLE_BUDGET)?;
    Ok(format!("3 inputs x 5 algorithms exact, {t:.2?}"))
}

fn c2_agreement() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 2..=7 {
        let all = enumerate_partitions(n, None).map_err(|e| e.to_string())?;
        for p in &all {
            let want: Vec<SetPartition> =
                all.iter().filter(|q| is_complementary_oracle(p, q).unwrap()).cloned().collect();
            for a in Algorithm::ALL {
                let got = complementary(p, a).map_err(|e| e.to_string())?;
                ensure(got == want, || format!("{a} disagrees with the join oracle on {p}"))?;
            }
            checked += 1;
        }
    }
    let t = within(start, AGREEMENT_BUDGET)?;
    Ok(format!("{checked} partitions, n = 2..7, {t:.2?}"))
}

fn c3_counting() -> Outcome {
    let mut checked = 0;
    for n in 1..=8 {
        let all = enumerate_partitions(n, None).map_err(|e| e.to_string())?;
        let total = bell(n);
        for p in &all {
            let c = complementary(p, Algorithm::Twoblock).map_err(|e| e.to_string())?.len();
            let direct = all.iter().filter(|q| !is_complementary_oracle(p, q).unwrap()).count();
            let ie = count_not_complementary(p).map_err(|e| e.to_string())?;
            ensure(ie == direct.into(), || format!("{p}: inclusion-exclusion {ie}, direct {direct}"))?;
            ensure(ie + c == total, || format!("{p}: counts do not sum to bell({n})"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} partitions, n = 1..8"))
}

fn c4_symbolic() -> Outcome {
    let gc = generalized_cumulant(&"1|23".parse().unwrap()).map_err(|e| e.to_string())?;
    let want = kappa(&[(1, &["1,1,1"]), (1, &["0,1,0", "1,0,1"]), (1, &["0,0,1", "1,1,0"])]);
    ensure(gc == want, || format!("gc(1|23) = {gc}"))?;
    let gmc = generalized_mv_cumulant(&"1,0|0,2".parse().unwrap()).map_err(|e| e.to_string())?;
    let want = kappa(&[(1, &["1,2"]), (2, &["1,1", "0,1"])]);
    ensure(gmc == want, || format!("gmc((1,0)|(0,2)) = {gmc}"))?;
    let m = moments_to_cumulants(&mi("1,1,1")).map_err(|e| e.to_string())?;
    let want = kappa(&[
        (1, &["1,1,1"]),
        (1, &["1,1,0", "0,0,1"]),
        (1, &["1,0,1", "0,1,0"]),
        (1, &["0,1,1", "1,0,0"]),
        (1, &["1,0,0", "0,1,0", "0,0,1"]),
    ]);
    ensure(m == want, || format!("m2c(1,1,1) = {m}"))?;
    Ok(format!("{gmc}"))
}

fn c5_mv_paths() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for i in targets(4, 6) {
        for l in enumerate_multiindex_partitions(&i).map_err(|e| e.to_string())? {
            let a = generalized_mv_cumulant(&l).map_err(|e| e.to_string())?;
            let b = generalized_mv_cumulant_optimized(&l).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("{l}: {a} vs {b}"))?;
            checked += 1;
        }
    }
    let t = within(start, MV_BUDGET)?;
    Ok(format!("{checked} multi-index partitions, arity <= 4, |i| <= 6, {t:.2?}"))
}

fn c6_preimages() -> Outcome {
    let mut checked = 0;
    for i in targets(6, 6) {
        let rule = LabelingRule::new(&i).map_err(|e| e.to_string())?;
        for l in enumerate_multiindex_partitions(&i).map_err(|e| e.to_string())? {
            let got = phi_preimage(&l, &rule).map_err(|e| e.to_string())?.len();
            let d = d_coefficient(&l);
            ensure(d == got.into(), || format!("{l}: {got} preimages, d = {d}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} multi-index partitions, arity <= 6, |i| <= 6"))
}

fn c7_appendix() -> Outcome {
    let mut checked = 0;
    for n in 1..=7 {
        for p in enumerate_partitions(n, None).map_err(|e| e.to_string())? {
            let l = to_onevec(&p);
            let s = gencum_core::cumulant::alternating_sum_check(&l);
            let want = BigInt::from(p.is_one() as i32);
            ensure(s == want, || format!("alternating sum on {p} is {s}"))?;
            if n <= 6 {
                let collected = generalized_cumulant_in_moments(&l).to_cumulants().map_err(|e| e.to_string())?;
                let direct = generalized_cumulant(&p).map_err(|e| e.to_string())?;
                ensure(collected == direct, || format!("substitute-and-collect differs on {p}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} partitions"))
}

fn c8_polykays() -> Outcome {
    let np = |c: &[i64]| NPoly::new(c.iter().map(|&x| BigInt::from(x)).collect());
    let k = polykay(&"1,1,0|0,0,1".parse().unwrap()).map_err(|e| e.to_string())?;
    let want = PowerSumPolynomial::from_terms(
        3,
        3,
        [
            (mono(&["0,0,1", "1,0,0", "0,1,0"]), np(&[-1])),
            (mono(&["0,0,1", "1,1,0"]), np(&[-1, 1])),
            (mono(&["0,1,0", "1,0,1"]), np(&[1])),
            (mono(&["0,1,1", "1,0,0"]), np(&[1])),
            (mono(&["1,1,1"]), np(&[0, -1])),
        ],
    );
    ensure(k == want, || format!("k110;001 = {k}"))?;
    let lam: MultiIndexPartition = "1,0|0,2".parse().unwrap();
    let e = estimator_gmc(&lam).map_err(|e| e.to_string())?;
    let want = PowerSumPolynomial::from_terms(2, 2, [(mono(&["1,2"]), np(&[0, 1])), (mono(&["1,0", "0,2"]), np(&[-1]))]);
    ensure(e == want, || format!("estimator = {e}"))?;
    Ok(format!("{e}"))
}

fn c9_unbiasedness() -> Outcome {
    let start = Instant::now();
    let expr = estimator_gmc(&"1,0|0,2".parse().unwrap()).map_err(|e| e.to_string())?;
    let (m1, m2, v1, v2, c) = (1.0, 2.0, 1.0, 1.0, 0.5);
    let truth = 2.0 * m2 * c;
    let (l11, l21) = (f64::sqrt(v1), c / f64::sqrt(v1));
    let l22 = f64::sqrt(v2 - l21 * l21);
    let mut rng = ChaCha8Rng::seed_from_u64(MC_SEED);
    let mut values = Vec::with_capacity(MC_REPLICATES);
    for _ in 0..MC_REPLICATES {
        let rows = (0..MC_SAMPLE)
            .map(|_| {
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                vec![m1 + l11 * z1, m2 + l21 * z1 + l22 * z2]
            })
            .collect();
        let data = SampleMatrix::new(rows).map_err(|e| e.to_string())?;
        values.push(expr.evaluate(&data).map_err(|e| e.to_string())?);
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let se = (var / k).sqrt();
    let z = (mean - truth) / se;
    within(start, MC_BUDGET)?;
    let summary = format!("mean {mean:.4}, truth {truth}, se {se:.4}, z {z:+.2}");
    ensure(z.abs() <= MC_MAX_Z, || summary.clone())?;
    Ok(summary)
}

fn c10_ranking() -> Outcome {
    let start = Instant::now();
    let report = run_bench(&table1_types(false), BENCH_REPS).map_err(|e| e.to_string())?;
    println!("{report}");
    for row in &report.rows {
        let t = &row.median_ms;
        for a in &Algorithm::ALL[1..] {
            ensure(t.twoblock <= t.get(*a), || {
                format!("{}: twoblock {:.3} ms > {a} {:.3} ms", row.block_type, t.twoblock, t.get(*a))
            })?;
        }
        if row.block_type.n() == 9 {
            for a in [Algorithm::Laplacian, Algorithm::Nullspace] {
                let ratio = t.get(a) / t.twoblock;
                ensure(ratio >= N9_MIN_SPEEDUP, || {
                    format!("{}: {a} only {ratio:.2}x slower than twoblock", row.block_type)
                })?;
            }
        }
    }
    let t = within(start, BENCH_BUDGET)?;
    Ok(format!("{} rows, {BENCH_REPS} reps, {t:.2?}", report.rows.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("worked csp examples", c1_examples),
        ("five-way agreement with the join oracle", c2_agreement),
        ("counting identity", c3_counting),
        ("symbolic examples", c4_symbolic),
        ("generalized multivariate cumulant paths", c5_mv_paths),
        ("preimage counts equal d", c6_preimages),
        ("alternating sums and moment collection", c7_appendix),
        ("polykay and estimator forms", c8_polykays),
        ("Monte Carlo unbiasedness", c9_unbiasedness),
        ("benchmark ranking", c10_ranking),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.into_iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
