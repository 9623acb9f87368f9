//! Multi-indexes and multi-index partitions.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default ceiling on `|i|` for multi-index partition enumeration.
pub const DEFAULT_MAX_ORDER: usize = 12;

/// A vector of non-negative integers. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `1̄_n`.
    pub fn ones(n: usize) -> Self {
        MultiIndex(vec![1; n])
    }

    /// Standard basis vector `e_j`, 0-based.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[j] = 1;
        MultiIndex(v)
    }

    /// Indicator vector of a bit mask over `n` coordinates.
    pub fn from_mask(n: usize, mask: u32) -> Self {
        MultiIndex((0..n).map(|k| (mask >> k) & 1).collect())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// `|i|`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// `i!`.
    pub fn factorial(&self) -> BigUint {
        self.0.iter().map(|&x| factorial(x as usize)).product()
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.arity(), rhs.arity());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad multi-index entry {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiIndex(entries))
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// `Λ ⊢ i`: distinct non-zero columns in decreasing order, each with a
/// multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndexPartition {
    columns: Vec<(MultiIndex, u32)>,
    target: MultiIndex,
}

impl MultiIndexPartition {
    /// Collects columns (in any order, repeats allowed) into canonical form.
    pub fn new(mut columns: Vec<MultiIndex>) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::InvalidPartition("multi-index partition needs a column".into()));
        };
        let arity = first.arity();
        if arity == 0 {
            return Err(Error::InvalidPartition("zero-length multi-index".into()));
        }
        for c in &columns {
            if c.arity() != arity {
                return Err(Error::DimensionMismatch {
                    left: arity,
                    right: c.arity(),
                });
            }
            if c.is_zero() {
                return Err(Error::InvalidPartition("zero column".into()));
            }
        }
        columns.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self::from_sorted_columns(columns))
    }

    pub fn with_multiplicities(columns: Vec<(MultiIndex, u32)>) -> Result<Self> {
        if columns.iter().any(|(_, r)| *r == 0) {
            return Err(Error::InvalidPartition("zero multiplicity".into()));
        }
        Self::new(
            columns
                .into_iter()
                .flat_map(|(c, r)| std::iter::repeat_n(c, r as usize))
                .collect(),
        )
    }

    /// `columns` must be non-empty, non-zero, of equal arity and sorted
    /// decreasingly.
    pub(crate) fn from_sorted_columns(columns: Vec<MultiIndex>) -> Self {
        let mut grouped: Vec<(MultiIndex, u32)> = Vec::new();
        let mut target = MultiIndex::zeros(columns[0].arity());
        for c in columns {
            target = &target + &c;
            match grouped.last_mut() {
                Some((last, r)) if *last == c => *r += 1,
                _ => grouped.push((c, 1)),
            }
        }
        MultiIndexPartition {
            columns: grouped,
            target,
        }
    }

    /// Distinct columns, decreasing, with multiplicities.
    pub fn columns(&self) -> &[(MultiIndex, u32)] {
        &self.columns
    }

    /// Columns with repeats expanded, decreasing.
    pub fn expanded(&self) -> Vec<MultiIndex> {
        self.columns
            .iter()
            .flat_map(|(c, r)| std::iter::repeat_n(c.clone(), *r as usize))
            .collect()
    }

    /// `l(Λ)`.
    pub fn len(&self) -> usize {
        self.columns.iter().map(|(_, r)| *r as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn target(&self) -> &MultiIndex {
        &self.target
    }

    pub fn arity(&self) -> usize {
        self.target.arity()
    }
}

impl fmt::Display for MultiIndexPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, (c, r)) in self.columns.iter().enumerate() {
            if j > 0 {
                f.write_str("|")?;
            }
            write!(f, "{c}")?;
            if *r > 1 {
                write!(f, "^{r}")?;
            }
        }
        Ok(())
    }
}

/// Parses `1,0,0|0,1,1^2`.
impl FromStr for MultiIndexPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut columns = Vec::new();
        for raw in s.split('|') {
            let (col, mult) = match raw.split_once('^') {
                Some((c, r)) => {
                    let r = r
                        .trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad multiplicity {r:?} in {s:?}")))?;
                    (c, r)
                }
                None => (raw, 1),
            };
            let col: MultiIndex = col.trim().parse()?;
            columns.push((col, mult));
        }
        MultiIndexPartition::with_multiplicities(columns)
    }
}

impl Serialize for MultiIndexPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Lists every `Λ ⊢ i`. The first entry is the single column `(i)`; the
/// order is decreasing lexicographic on the expanded column sequences.
pub fn enumerate_multiindex_partitions(i: &MultiIndex) -> Result<Vec<MultiIndexPartition>> {
    enumerate_multiindex_partitions_with_limit(i, DEFAULT_MAX_ORDER)
}

pub fn enumerate_multiindex_partitions_with_limit(
    i: &MultiIndex,
    max_order: usize,
) -> Result<Vec<MultiIndexPartition>> {
    let order = i.order();
    if order == 0 {
        return Err(Error::EmptyTarget);
    }
    if order > max_order {
        return Err(Error::OutOfBounds {
            what: "|i|",
            value: order,
            min: 1,
            max: max_order,
        });
    }
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for_each_multiindex_partition(i, &mut |cols| {
        out.push(MultiIndexPartition::from_sorted_columns(cols.to_vec()));
    }, &mut stack);
    Ok(out)
}

/// Calls `f` with the decreasing column list of every `Λ ⊢ i`.
pub(crate) fn for_each_multiindex_partition(
    i: &MultiIndex,
    f: &mut impl FnMut(&[MultiIndex]),
    stack: &mut Vec<MultiIndex>,
) {
    fn rec<F: FnMut(&[MultiIndex])>(rem: &MultiIndex, bound: &MultiIndex, stack: &mut Vec<MultiIndex>, f: &mut F) {
        if rem.is_zero() {
            f(stack);
            return;
        }
        let mut cur = vec![0u32; rem.arity()];
        candidates(rem, bound, 0, true, &mut cur, &mut |c| {
            let next = MultiIndex(rem.0.iter().zip(&c.0).map(|(a, b)| a - b).collect());
            stack.push(c.clone());
            rec(&next, c, stack, f);
            stack.pop();
        });
    }

    // Non-zero vectors `c <= rem` componentwise and `c <= bound`
    // lexicographically, in decreasing lexicographic order.
    fn candidates<G: FnMut(&MultiIndex)>(
        rem: &MultiIndex,
        bound: &MultiIndex,
        pos: usize,
        tight: bool,
        cur: &mut Vec<u32>,
        g: &mut G,
    ) {
        if pos == rem.arity() {
            if cur.iter().any(|&x| x != 0) {
                g(&MultiIndex(cur.clone()));
            }
            return;
        }
        let hi = if tight { rem.0[pos].min(bound.0[pos]) } else { rem.0[pos] };
        for v in (0..=hi).rev() {
            cur[pos] = v;
            candidates(rem, bound, pos + 1, tight && v == bound.0[pos], cur, g);
        }
        cur[pos] = 0;
    }

    debug_assert!(stack.is_empty());
    rec(i, i, stack, f);
}

/// `d_Λ = i! / Π_j ((λ_j!)^{r_j} r_j!)`. Always an integer.
pub fn d_coefficient(l: &MultiIndexPartition) -> BigUint {
    let mut denom = BigUint::one();
    for (c, r) in &l.columns {
        denom *= c.factorial().pow(*r) * factorial(*r as usize);
    }
    let (q, rem) = l.target.factorial().div_rem(&denom);
    debug_assert!(rem == BigUint::ZERO);
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::bell;
    use std::collections::BTreeSet;

    fn mi(s: &str) -> MultiIndex {
        s.parse().unwrap()
    }

    fn lam(s: &str) -> MultiIndexPartition {
        s.parse().unwrap()
    }

    fn shown(i: &str) -> Vec<String> {
        enumerate_multiindex_partitions(&mi(i))
            .unwrap()
            .iter()
            .map(|l| l.to_string())
            .collect()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(shown("1,1"), ["1,1", "1,0|0,1"]);
        assert_eq!(shown("2"), ["2", "1^2"]);
        assert!(shown("1,2,2").contains(&"1,1,1|0,1,1".to_string()));
        assert!(matches!(
            enumerate_multiindex_partitions(&mi("0,0")),
            Err(Error::EmptyTarget)
        ));
        assert!(matches!(
            enumerate_multiindex_partitions(&mi("13")),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn ones_target_counts_bell() {
        for n in 1..=7 {
            let all = enumerate_multiindex_partitions(&MultiIndex::ones(n)).unwrap();
            assert_eq!(BigUint::from(all.len()), bell(n));
        }
    }

    #[test]
    fn integer_partition_counts() {
        let p = [1usize, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &count) in p.iter().enumerate().skip(1) {
            assert_eq!(enumerate_multiindex_partitions(&MultiIndex::new(vec![n as u32])).unwrap().len(), count);
        }
    }

    // Brute-force ordered subdivisions: sequences of non-zero vectors summing
    // to the remainder.
    fn ordered_subdivisions(rem: &[u32], prefix: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if rem.iter().all(|&x| x == 0) {
            out.push(prefix.clone());
            return;
        }
        let total: u32 = rem.iter().map(|&x| x + 1).product();
        for code in 1..total {
            let mut c = Vec::with_capacity(rem.len());
            let mut k = code;
            for &r in rem {
                c.push(k % (r + 1));
                k /= r + 1;
            }
            let next: Vec<u32> = rem.iter().zip(&c).map(|(a, b)| a - b).collect();
            prefix.push(c);
            ordered_subdivisions(&next, prefix, out);
            prefix.pop();
        }
    }

    fn all_targets(max_order: usize, max_arity: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for n in 1..=max_arity {
            let total = (max_order as u32 + 1).pow(n as u32);
            for code in 0..total {
                let mut v = Vec::with_capacity(n);
                let mut k = code;
                for _ in 0..n {
                    v.push(k % (max_order as u32 + 1));
                    k /= max_order as u32 + 1;
                }
                let m = MultiIndex::new(v);
                if (1..=max_order).contains(&m.order()) {
                    out.push(m);
                }
            }
        }
        out
    }

    #[test]
    fn matches_brute_force_subdivisions() {
        for i in all_targets(6, 3) {
            let mut ordered = Vec::new();
            ordered_subdivisions(i.entries(), &mut Vec::new(), &mut ordered);
            let unordered: BTreeSet<Vec<Vec<u32>>> = ordered
                .iter()
                .map(|s| {
                    let mut s = s.clone();
                    s.sort();
                    s
                })
                .collect();
            let parts = enumerate_multiindex_partitions(&i).unwrap();
            assert_eq!(parts.len(), unordered.len(), "target {i}");
            let arrangements: BigUint = parts
                .iter()
                .map(|l| {
                    let denom: BigUint = l.columns().iter().map(|(_, r)| factorial(*r as usize)).product();
                    factorial(l.len()) / denom
                })
                .sum();
            assert_eq!(arrangements, BigUint::from(ordered.len()), "target {i}");
            assert!(parts.windows(2).all(|w| w[0].expanded() > w[1].expanded()));
            for l in &parts {
                assert_eq!(l.target(), &i);
            }
        }
    }

    #[test]
    fn d_coefficient_examples() {
        assert_eq!(d_coefficient(&lam("1,0,0|0,1,1^2")), BigUint::from(2u32));
        assert_eq!(d_coefficient(&lam("2")), BigUint::from(1u32));
        for l in enumerate_multiindex_partitions(&MultiIndex::ones(5)).unwrap() {
            assert_eq!(d_coefficient(&l), BigUint::from(1u32));
        }
    }

    #[test]
    fn parse_and_display() {
        let l = lam("0,1,1|1,0,0|0,1,1");
        assert_eq!(l.to_string(), "1,0,0|0,1,1^2");
        assert_eq!(l.len(), 3);
        assert_eq!(l.target(), &mi("1,2,2"));
        assert!("1,0|0,0".parse::<MultiIndexPartition>().is_err());
        assert!("1,0|1".parse::<MultiIndexPartition>().is_err());
        assert!("1,0^0".parse::<MultiIndexPartition>().is_err());
        assert!("a".parse::<MultiIndexPartition>().is_err());
    }
}
