//! Complementary set partitions.
//!
//! Five interchangeable algorithms list `{π̃ ∈ Π_n : π ∨ π̃ = 1_n}`:
//!
//! * `twoblock`: removes from `Π_n` every partition that refines a two-block
//!   coarsening of `π`;
//! * `graph`: union-find connectivity of the union of both clique covers;
//! * `laplacian`: integer rank of the Laplacian of that union graph;
//! * `nullspace`: dimension of the intersection of the column spans;
//! * `stafford`: expands the generalized cumulant in moments and back.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint, Sign};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Serialize, Serializer};

use crate::cumulant::{generalized_cumulant_in_moments, terms_as_partitions};
use crate::error::{Error, Result};
use crate::linalg::{self, Q};
use crate::multiindex::{enumerate_multiindex_partitions, MultiIndex};
use crate::onevec::{to_onevec, OneVecPartition};
use crate::partition::{
    bell, bits, check_ground, for_each_keyed_partition_of, for_each_partition_of, full_mask, partition_key, SetPartition, DEFAULT_MAX_N,
};
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Twoblock,
    Graph,
    Laplacian,
    Nullspace,
    Stafford,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Twoblock,
        Algorithm::Graph,
        Algorithm::Laplacian,
        Algorithm::Nullspace,
        Algorithm::Stafford,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Twoblock => "twoblock",
            Algorithm::Graph => "graph",
            Algorithm::Laplacian => "laplacian",
            Algorithm::Nullspace => "nullspace",
            Algorithm::Stafford => "stafford",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown algorithm {s:?}")))
    }
}

impl Serialize for Algorithm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CspResult {
    pub input: SetPartition,
    pub algorithm: Algorithm,
    pub complementary: Vec<SetPartition>,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub(crate) fn check_enumerable(n: usize) -> Result<()> {
    check_ground(n)?;
    if n > DEFAULT_MAX_N {
        return Err(Error::OutOfBounds {
            what: "n",
            value: n,
            min: 1,
            max: DEFAULT_MAX_N,
        });
    }
    Ok(())
}

/// Runs one algorithm and times it.
pub fn csp(p: &SetPartition, algorithm: Algorithm) -> Result<CspResult> {
    let start = Instant::now();
    let complementary = complementary(p, algorithm)?;
    let elapsed = start.elapsed();
    Ok(CspResult {
        input: p.clone(),
        algorithm,
        complementary,
        elapsed,
    })
}

pub fn csp_twoblock(p: &SetPartition) -> Result<CspResult> {
    csp(p, Algorithm::Twoblock)
}

pub fn csp_graph(p: &SetPartition) -> Result<CspResult> {
    csp(p, Algorithm::Graph)
}

pub fn csp_laplacian(p: &SetPartition) -> Result<CspResult> {
    csp(p, Algorithm::Laplacian)
}

pub fn csp_nullspace(p: &SetPartition) -> Result<CspResult> {
    csp(p, Algorithm::Nullspace)
}

pub fn csp_stafford(p: &SetPartition) -> Result<CspResult> {
    csp(p, Algorithm::Stafford)
}

/// Complementary partitions of `p` in the `cr2` order.
pub fn complementary(p: &SetPartition, algorithm: Algorithm) -> Result<Vec<SetPartition>> {
    check_enumerable(p.n())?;
    Ok(match algorithm {
        Algorithm::Twoblock => twoblock(p),
        Algorithm::Graph => filter_lattice(p.n(), graph_test(p)),
        Algorithm::Laplacian => filter_lattice(p.n(), laplacian_test(p)),
        Algorithm::Nullspace => filter_lattice(p.n(), nullspace_test(p)),
        Algorithm::Stafford => stafford(p)?,
    })
}

fn filter_lattice(n: usize, mut keep: impl FnMut(&[u32]) -> bool) -> Vec<SetPartition> {
    filter_keyed_lattice(n, 0, |blocks, _| keep(blocks))
}

fn filter_keyed_lattice(n: usize, capacity: usize, mut keep: impl FnMut(&[u32], u64) -> bool) -> Vec<SetPartition> {
    let mut out = Vec::with_capacity(capacity);
    for_each_keyed_partition_of(full_mask(n), &mut |blocks, key| {
        if keep(blocks, key) {
            out.push(SetPartition::from_cr2_masks(n, blocks.to_vec()));
        }
    });
    out
}

/// Unions of blocks of `p` indexed by the two sides of every two-block split
/// of `[m]`; the first block always lies on the left.
fn two_block_splits(p: &SetPartition) -> Vec<(u32, u32)> {
    let blocks = p.masks();
    let m = blocks.len();
    if m < 2 {
        return Vec::new();
    }
    let all = full_mask(m);
    (0..1u32 << (m - 1))
        .map(|rest| (rest << 1) | 1)
        .filter(|&c1| c1 != all)
        .map(|c1| {
            let a1 = bits(c1).fold(0, |acc, j| acc | blocks[j]);
            let a2 = bits(all & !c1).fold(0, |acc, j| acc | blocks[j]);
            (a1, a2)
        })
        .collect()
}

/// Keys of `𝒯_π`: every `π̃_1 ∪ π̃_2` with `π̃_j` a partition of `A_j`, over
/// all two-block splits.
pub(crate) fn not_complementary_keys(p: &SetPartition) -> FxHashSet<u64> {
    let splits = two_block_splits(p);
    let sides: usize = splits
        .iter()
        .map(|&(a1, a2)| bell_bound(a1.count_ones() as usize) + bell_bound(a2.count_ones() as usize))
        .sum();
    let mut keys = Vec::with_capacity(sides);
    let mut ranges = Vec::with_capacity(splits.len());
    let mut generated = 0;
    for &(a1, a2) in &splits {
        let start = keys.len();
        for_each_keyed_partition_of(a1, &mut |_, key| keys.push(key));
        let mid = keys.len();
        for_each_keyed_partition_of(a2, &mut |_, key| keys.push(key));
        generated += (mid - start) * (keys.len() - mid);
        ranges.push((start, mid, keys.len()));
    }
    let mut set = FxHashSet::with_capacity_and_hasher(generated.min(bell_bound(p.n())), Default::default());
    for (start, mid, end) in ranges {
        let (left, right) = (&keys[start..mid], &keys[mid..end]);
        for &x in left {
            set.extend(right.iter().map(|&y| x | y));
        }
    }
    set
}

fn bell_bound(n: usize) -> usize {
    const BELL: [usize; DEFAULT_MAX_N + 1] = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570, 4213597];
    BELL[n]
}

fn twoblock(p: &SetPartition) -> Vec<SetPartition> {
    let excluded = not_complementary_keys(p);
    let kept = bell_bound(p.n()) - excluded.len();
    filter_keyed_lattice(p.n(), kept, |_, key| !excluded.contains(&key))
}

/// Elements of each block joined by a path.
fn add_paths(uf: &mut UnionFind, blocks: &[u32]) {
    for &b in blocks {
        let first = b.trailing_zeros() as usize;
        for e in bits(b & (b - 1)) {
            uf.union(first, e);
        }
    }
}

fn graph_test(p: &SetPartition) -> impl FnMut(&[u32]) -> bool {
    let mut base = UnionFind::new(p.n());
    add_paths(&mut base, p.masks());
    move |blocks| {
        let mut uf = base.clone();
        add_paths(&mut uf, blocks);
        uf.components() == 1
    }
}

fn laplacian_test(p: &SetPartition) -> impl FnMut(&[u32]) -> bool {
    let n = p.n();
    let own: Vec<u32> = (0..n)
        .map(|e| *p.masks().iter().find(|&&b| b >> e & 1 == 1).expect("blocks cover [n]"))
        .collect();
    move |blocks| {
        let mut lap = vec![vec![0i128; n]; n];
        for &b in blocks {
            for e in bits(b) {
                let nbrs = (own[e] | b) & !(1 << e);
                lap[e][e] = nbrs.count_ones() as i128;
                for f in bits(nbrs) {
                    lap[e][f] = -1;
                }
            }
        }
        linalg::integer_rank(lap) == n - 1
    }
}

/// Some block of `a` other than the whole ground set is a union of blocks of
/// `b`. Then `V_a ∩ V_b` contains that block and `1_n`.
fn block_is_union_of(a: &[u32], b: &[u32], full: u32) -> bool {
    a.iter().any(|&x| {
        x != full && {
            let cover = b.iter().filter(|&&y| y & x != 0).fold(0, |acc, &y| acc | y);
            cover == x
        }
    })
}

fn nullspace_test(p: &SetPartition) -> impl FnMut(&[u32]) -> bool {
    let n = p.n();
    let full = full_mask(n);
    let pv = to_onevec(p);
    let m = p.len();
    move |blocks| {
        if m + blocks.len() >= n + 2 {
            return false;
        }
        let pm = pv.masks();
        if block_is_union_of(pm, blocks, full) || block_is_union_of(blocks, pm, full) {
            return false;
        }
        let cols = m + blocks.len();
        let rows: Vec<Vec<Q>> = (0..n)
            .map(|t| {
                let mut row = vec![Q::from_integer(0); cols];
                for (j, &c) in pm.iter().chain(blocks).enumerate() {
                    if c >> t & 1 == 1 {
                        row[j] = Q::from_integer(if j < m { 1 } else { -1 });
                    }
                }
                row
            })
            .collect();
        linalg::nullspace(rows, cols).len() == 1
    }
}

fn stafford(p: &SetPartition) -> Result<Vec<SetPartition>> {
    let moments = generalized_cumulant_in_moments(&to_onevec(p));
    terms_as_partitions(&moments.to_cumulants()?)
}

/// `|𝒯_π|`, the number of partitions not complementary to `p`, by
/// inclusion–exclusion over the two-block splits of the blocks of `p`.
pub fn count_not_complementary(p: &SetPartition) -> Result<BigUint> {
    check_ground(p.n())?;
    let blocks = p.masks();
    let mut complementary = BigInt::from(0);
    for (rho, coeff) in split_meet_coefficients(blocks.len()).iter() {
        let mut term = BigInt::from(*coeff);
        for &r in rho {
            let size = bits(r).map(|j| blocks[j].count_ones() as usize).sum();
            term *= BigInt::from_biguint(Sign::Plus, bell(size));
        }
        complementary += term;
    }
    let total = BigInt::from_biguint(Sign::Plus, bell(p.n()));
    Ok((total - complementary).to_biguint().expect("count is non-negative"))
}

/// Largest `m` for which the split coefficients come from the explicit
/// inclusion–exclusion recursion. Beyond it the closed form of the result is
/// used.
const SPLIT_DP_MAX: usize = 8;

/// Inclusion–exclusion over the two-block splits of `[m]`, grouped by the
/// meet of the chosen splits: for each partition `ρ` of `[m]` (as block
/// masks), `Σ_{S : ∧S = ρ} (-1)^{|S|}`, with `∧∅ = 1_m`. Entries with a zero
/// sum are dropped.
/// Meets `ρ` of `[m]` (block masks) with their coefficient.
type SplitCoefficients = Vec<(Vec<u32>, i64)>;

pub(crate) fn split_meet_coefficients(m: usize) -> Arc<Vec<(Vec<u32>, i64)>> {
    static CACHE: [OnceLock<Arc<SplitCoefficients>>; 17] = [const { OnceLock::new() }; 17];
    assert!((1..=16).contains(&m), "m = {m} out of range");
    CACHE[m]
        .get_or_init(|| {
            Arc::new(if m <= SPLIT_DP_MAX {
                split_meet_recursion(m)
            } else {
                split_meet_closed_form(m)
            })
        })
        .clone()
}

pub(crate) fn split_meet_recursion(m: usize) -> Vec<(Vec<u32>, i64)> {
    let all = full_mask(m);
    let mut acc: FxHashMap<u64, (Vec<u32>, i64)> = FxHashMap::default();
    acc.insert(partition_key(&[all]), (vec![all], 1));
    for rest in 0..1u32 << (m.saturating_sub(1)) {
        let c1 = (rest << 1) | 1;
        if c1 == all {
            continue;
        }
        let c2 = all & !c1;
        let snapshot: Vec<(Vec<u32>, i64)> = acc.values().cloned().collect();
        for (rho, c) in snapshot {
            let mut meet: Vec<u32> = rho
                .iter()
                .flat_map(|&r| [r & c1, r & c2])
                .filter(|&x| x != 0)
                .collect();
            meet.sort_unstable_by_key(|x| x.trailing_zeros());
            let entry = acc.entry(partition_key(&meet)).or_insert_with(|| (meet, 0));
            entry.1 -= c;
        }
    }
    let mut out: Vec<(Vec<u32>, i64)> = acc.into_values().filter(|(_, c)| *c != 0).collect();
    out.sort_unstable();
    out
}

/// The recursion above telescopes to `(-1)^{|ρ|-1} (|ρ|-1)!`.
fn split_meet_closed_form(m: usize) -> Vec<(Vec<u32>, i64)> {
    let mut out = Vec::new();
    for_each_partition_of(full_mask(m), &mut |rho| {
        let l = rho.len() as i64;
        let f: i64 = (1..l).product();
        out.push((rho.to_vec(), if l % 2 == 1 { f } else { -f }));
    });
    out.sort_unstable();
    out
}

/// Transports `source_csp` along the relabeling that maps the `cr1` form of
/// `source` position by position onto the `cr1` form of `target`.
pub fn swap_transfer(
    source: &SetPartition,
    source_csp: &[SetPartition],
    target: &SetPartition,
) -> Result<Vec<SetPartition>> {
    let (ts, tt) = (source.block_type(), target.block_type());
    if ts != tt || source.n() != target.n() {
        return Err(Error::IncompatibleType {
            source_type: ts.to_string(),
            target_type: tt.to_string(),
        });
    }
    let mut image = vec![0usize; source.n()];
    for (&a, &b) in source.to_cr1().masks().iter().zip(target.to_cr1().masks()) {
        for (x, y) in bits(a).zip(bits(b)) {
            image[x] = y + 1;
        }
    }
    let mut out = source_csp
        .iter()
        .map(|q| q.relabel(&image))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

/// The two-block method on `1̄_n`-partitions: removes from `ℳ_n` every block
/// matrix `(Λ⁽¹⁾, Λ⁽²⁾)` with `Λ⁽ʲ⁾ ⊢ v_j`, `v_j` the sum of the columns on
/// side `j` of a two-block split.
pub fn csp_twoblock_onevec(l: &OneVecPartition) -> Result<Vec<OneVecPartition>> {
    let n = l.n();
    check_enumerable(n)?;
    let p = l.to_partition();
    let masks_of = |v: u32| -> Result<Vec<u64>> {
        Ok(enumerate_multiindex_partitions(&MultiIndex::from_mask(n, v))?
            .iter()
            .map(|lam| partition_key(&lam.expanded().iter().map(index_mask).collect::<Vec<_>>()))
            .collect())
    };
    let mut excluded = FxHashSet::default();
    for (v1, v2) in two_block_splits(&p) {
        let (left, right) = (masks_of(v1)?, masks_of(v2)?);
        for &x in &left {
            for &y in &right {
                excluded.insert(x | y);
            }
        }
    }
    let mut out = Vec::new();
    for lam in enumerate_multiindex_partitions(&MultiIndex::ones(n))? {
        let masks: Vec<u32> = lam.expanded().iter().map(index_mask).collect();
        if !excluded.contains(&partition_key(&masks)) {
            out.push(OneVecPartition::from_masks(n, masks)?);
        }
    }
    out.sort_by_cached_key(OneVecPartition::to_partition);
    Ok(out)
}

fn index_mask(x: &MultiIndex) -> u32 {
    x.entries()
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &e)| acc | (e.min(1) << t))
}
