//! Set partitions of `[n]`, integer partitions and the refinement lattice.
//!
//! Blocks are stored as `u32` bit masks: bit `e - 1` is set when the element
//! `e` belongs to the block. Every stored partition is in one of the two
//! canonical forms:
//!
//! * `cr1`: blocks by decreasing cardinality, ties broken lexicographically;
//! * `cr2`: blocks in lexicographic order (equivalently, by least element).
//!
//! Equality, hashing and ordering ignore the stored form. The total order on
//! `Π_n` is the lexicographic order of the `cr2` block sequences, each block
//! read as its increasing list of elements.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Hard ceiling on the ground-set size. Partition keys pack one nibble per
/// element into a `u64`.
pub const MAX_ELEMENTS: usize = 16;

/// Default ceiling for full-lattice enumeration (`B_12 = 4_213_597`).
pub const DEFAULT_MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CanonicalForm {
    Cr1,
    #[default]
    Cr2,
}

#[derive(Clone, Debug)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<u32>,
    form: CanonicalForm,
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u32 {
    debug_assert!(n <= 32);
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Zero-based element indices of a mask, increasing.
#[inline]
pub(crate) fn bits(mut mask: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let e = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(e)
        }
    })
}

/// Lexicographic comparison of two blocks read as increasing element lists;
/// a proper prefix sorts first.
pub(crate) fn cmp_block(mut a: u32, mut b: u32) -> Ordering {
    while a != 0 && b != 0 {
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x.cmp(&y);
        }
        a &= a - 1;
        b &= b - 1;
    }
    match (a == 0, b == 0) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        _ => Ordering::Greater,
    }
}

fn sort_cr1(blocks: &mut [u32]) {
    blocks.sort_by(|a, b| b.count_ones().cmp(&a.count_ones()).then_with(|| cmp_block(*a, *b)));
}

fn sort_cr2(blocks: &mut [u32]) {
    // Disjoint blocks compare lexicographically by their least element.
    blocks.sort_unstable_by_key(|b| b.trailing_zeros());
}

/// Packs a partition into a `u64`: nibble `e` holds the least element of the
/// block containing `e`. Keys of partitions of disjoint ground sets combine
/// with a bitwise OR.
#[inline]
pub(crate) fn partition_key(blocks: &[u32]) -> u64 {
    let mut key = 0u64;
    for &b in blocks {
        let rep = b.trailing_zeros() as u64;
        for e in bits(b) {
            key |= rep << (4 * e);
        }
    }
    key
}

/// Calls `f` once for every partition of the elements in `ground`, in `cr2`
/// lexicographic order. The slice passed to `f` lists the blocks in `cr2`
/// order.
pub(crate) fn for_each_partition_of(ground: u32, f: &mut impl FnMut(&[u32])) {
    for_each_keyed_partition_of(ground, &mut |blocks, _| f(blocks));
}

/// As [`for_each_partition_of`], also passing the `partition_key` of each
/// partition, maintained incrementally.
pub(crate) fn for_each_keyed_partition_of(ground: u32, f: &mut impl FnMut(&[u32], u64)) {
    struct Walk<'a, F> {
        stack: Vec<u32>,
        f: &'a mut F,
    }

    impl<F: FnMut(&[u32], u64)> Walk<'_, F> {
        fn rest(&mut self, remaining: u32, key: u64) {
            if remaining == 0 {
                (self.f)(&self.stack, key);
                return;
            }
            let low = remaining & remaining.wrapping_neg();
            let rep = low.trailing_zeros() as u64;
            self.grow(low, remaining ^ low, remaining, rep, key | rep << (4 * rep));
        }

        // Preorder over the first block: the block itself, then every
        // extension by a larger element, in increasing order of that element.
        fn grow(&mut self, block: u32, avail: u32, remaining: u32, rep: u64, key: u64) {
            self.stack.push(block);
            self.rest(remaining ^ block, key);
            self.stack.pop();
            let mut a = avail;
            while a != 0 {
                let b = a & a.wrapping_neg();
                a ^= b;
                let e = b.trailing_zeros() as u64;
                self.grow(block | b, a, remaining, rep, key | rep << (4 * e));
            }
        }
    }

    let mut walk = Walk {
        stack: Vec::with_capacity(ground.count_ones() as usize),
        f,
    };
    walk.rest(ground, 0);
}

impl SetPartition {
    /// Builds a partition of `[n]` from 1-based blocks, stored in `cr2`.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        check_ground(n)?;
        let mut masks = Vec::with_capacity(blocks.len());
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            let mut mask = 0u32;
            for &e in block {
                if e == 0 || e > n {
                    return Err(Error::InvalidPartition(format!("element {e} not in 1..={n}")));
                }
                let bit = 1u32 << (e - 1);
                if mask & bit != 0 {
                    return Err(Error::InvalidPartition(format!("element {e} repeated in a block")));
                }
                mask |= bit;
            }
            masks.push(mask);
        }
        Self::from_masks(n, masks)
    }

    /// Builds a partition from block masks, stored in `cr2`.
    pub fn from_masks(n: usize, mut masks: Vec<u32>) -> Result<Self> {
        check_ground(n)?;
        let mut seen = 0u32;
        for &m in &masks {
            if m == 0 {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if seen & m != 0 {
                return Err(Error::InvalidPartition("blocks overlap".into()));
            }
            seen |= m;
        }
        if seen != full_mask(n) {
            return Err(Error::InvalidPartition(format!("blocks do not cover 1..={n}")));
        }
        sort_cr2(&mut masks);
        Ok(SetPartition {
            n,
            blocks: masks,
            form: CanonicalForm::Cr2,
        })
    }

    /// `masks` must already be a valid partition listed in `cr2` order.
    pub(crate) fn from_cr2_masks(n: usize, masks: Vec<u32>) -> Self {
        debug_assert!(masks.windows(2).all(|w| w[0].trailing_zeros() < w[1].trailing_zeros()));
        debug_assert_eq!(masks.iter().fold(0, |a, b| a | b), full_mask(n));
        SetPartition {
            n,
            blocks: masks,
            form: CanonicalForm::Cr2,
        }
    }

    /// The one-block partition `1_n`.
    pub fn one(n: usize) -> Self {
        assert!((1..=MAX_ELEMENTS).contains(&n), "n = {n} out of range");
        Self::from_cr2_masks(n, vec![full_mask(n)])
    }

    /// The singleton partition `0_n`.
    pub fn zero(n: usize) -> Self {
        assert!((1..=MAX_ELEMENTS).contains(&n), "n = {n} out of range");
        Self::from_cr2_masks(n, (0..n).map(|e| 1u32 << e).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn form(&self) -> CanonicalForm {
        self.form
    }

    /// Block masks in the stored order.
    pub fn masks(&self) -> &[u32] {
        &self.blocks
    }

    /// Blocks as increasing lists of 1-based elements, in the stored order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|&b| bits(b).map(|e| e + 1).collect()).collect()
    }

    pub(crate) fn cr2_masks(&self) -> Cow<'_, [u32]> {
        match self.form {
            CanonicalForm::Cr2 => Cow::Borrowed(&self.blocks),
            CanonicalForm::Cr1 => {
                let mut b = self.blocks.clone();
                sort_cr2(&mut b);
                Cow::Owned(b)
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn key(&self) -> u64 {
        partition_key(&self.blocks)
    }

    pub fn is_one(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn canonicalize(&self, form: CanonicalForm) -> Self {
        let mut blocks = self.blocks.clone();
        match form {
            CanonicalForm::Cr1 => sort_cr1(&mut blocks),
            CanonicalForm::Cr2 => sort_cr2(&mut blocks),
        }
        SetPartition {
            n: self.n,
            blocks,
            form,
        }
    }

    pub fn to_cr1(&self) -> Self {
        self.canonicalize(CanonicalForm::Cr1)
    }

    pub fn to_cr2(&self) -> Self {
        self.canonicalize(CanonicalForm::Cr2)
    }

    pub fn block_type(&self) -> IntegerPartition {
        IntegerPartition::from_sorted(self.blocks.iter().map(|b| b.count_ones() as usize).collect())
    }

    /// `true` when every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &SetPartition) -> bool {
        self.n == other.n && self.blocks.iter().all(|&b| other.blocks.iter().any(|&c| b & c == b))
    }

    /// Least upper bound in the refinement order.
    pub fn join(&self, other: &SetPartition) -> Result<SetPartition> {
        check_same_n(self.n, other.n)?;
        let mut merged: Vec<u32> = self.blocks.clone();
        for &c in &other.blocks {
            let mut acc = c;
            merged.retain(|&b| {
                if b & c != 0 {
                    acc |= b;
                    false
                } else {
                    true
                }
            });
            merged.push(acc);
        }
        sort_cr2(&mut merged);
        Ok(SetPartition::from_cr2_masks(self.n, merged))
    }

    /// Greatest lower bound: the non-empty pairwise block intersections.
    pub fn meet(&self, other: &SetPartition) -> Result<SetPartition> {
        check_same_n(self.n, other.n)?;
        let mut blocks: Vec<u32> = self
            .blocks
            .iter()
            .flat_map(|&b| other.blocks.iter().map(move |&c| b & c))
            .filter(|&x| x != 0)
            .collect();
        sort_cr2(&mut blocks);
        Ok(SetPartition::from_cr2_masks(self.n, blocks))
    }

    /// Applies the relabeling `e -> image[e - 1]` (1-based) and returns the
    /// result in `cr2`.
    pub fn relabel(&self, image: &[usize]) -> Result<SetPartition> {
        check_same_n(self.n, image.len())?;
        let masks = self
            .blocks
            .iter()
            .map(|&b| bits(b).fold(0u32, |acc, e| acc | 1 << (image[e] - 1)))
            .collect();
        SetPartition::from_masks(self.n, masks)
    }
}

pub(crate) fn check_ground(n: usize) -> Result<()> {
    if (1..=MAX_ELEMENTS).contains(&n) {
        Ok(())
    } else {
        Err(Error::OutOfBounds {
            what: "n",
            value: n,
            min: 1,
            max: MAX_ELEMENTS,
        })
    }
}

pub(crate) fn check_same_n(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

impl PartialEq for SetPartition {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.cr2_masks() == other.cr2_masks()
    }
}

impl Eq for SetPartition {}

impl Hash for SetPartition {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.cr2_masks().hash(state);
    }
}

impl Ord for SetPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.cr2_masks(), other.cr2_masks());
        for (x, y) in a.iter().zip(b.iter()) {
            match cmp_block(*x, *y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        a.len().cmp(&b.len()).then(self.n.cmp(&other.n))
    }
}

impl PartialOrd for SetPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = self.n <= 9;
        for (i, &b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, e) in bits(b).enumerate() {
                if j > 0 && !compact {
                    f.write_str(",")?;
                }
                write!(f, "{}", e + 1)?;
            }
        }
        Ok(())
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Accepts `1|2,3,4` and, when no comma appears anywhere, the compact digit
/// form `1|234`.
impl FromStr for SetPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty partition".into()));
        }
        let with_commas = s.contains(',');
        let mut blocks = Vec::new();
        for raw in s.split('|') {
            let raw = raw.trim();
            if raw.is_empty() {
                return Err(Error::Parse(format!("empty block in {s:?}")));
            }
            let block: Vec<usize> = if with_commas {
                raw.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad element {t:?} in {s:?}")))
                    })
                    .collect::<Result<_>>()?
            } else {
                raw.chars()
                    .map(|c| match c.to_digit(10) {
                        Some(d) if d > 0 => Ok(d as usize),
                        _ => Err(Error::Parse(format!("bad element {c:?} in {s:?}"))),
                    })
                    .collect::<Result<_>>()?
            };
            blocks.push(block);
        }
        let n = blocks.iter().flatten().copied().max().unwrap_or(0);
        SetPartition::new(n, blocks)
    }
}

/// Ground truth for complementarity: the join is the one-block partition.
pub fn is_complementary_oracle(p: &SetPartition, q: &SetPartition) -> Result<bool> {
    Ok(p.join(q)?.is_one())
}

/// Lists `Π_n` (or `Π_{n,m}` when `m` is given) in the `cr2` total order.
pub fn enumerate_partitions(n: usize, m: Option<usize>) -> Result<Vec<SetPartition>> {
    enumerate_partitions_with_limit(n, m, DEFAULT_MAX_N)
}

pub fn enumerate_partitions_with_limit(n: usize, m: Option<usize>, max_n: usize) -> Result<Vec<SetPartition>> {
    let max_n = max_n.min(MAX_ELEMENTS);
    if !(1..=max_n).contains(&n) {
        return Err(Error::OutOfBounds {
            what: "n",
            value: n,
            min: 1,
            max: max_n,
        });
    }
    if let Some(m) = m {
        if !(1..=n).contains(&m) {
            return Err(Error::OutOfBounds {
                what: "m",
                value: m,
                min: 1,
                max: n,
            });
        }
    }
    let mut out = Vec::new();
    for_each_partition_of(full_mask(n), &mut |blocks| {
        if m.is_none_or(|m| blocks.len() == m) {
            out.push(SetPartition::from_cr2_masks(n, blocks.to_vec()));
        }
    });
    Ok(out)
}

/// Bell number via the Bell triangle.
pub fn bell(n: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().cloned().unwrap_or_default());
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    row[0].clone()
}

/// Stirling number of the second kind.
pub fn stirling2(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    // prev[j] = S(i, j)
    let mut prev = vec![BigUint::zero(); k + 1];
    prev[0] = BigUint::one();
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); k + 1];
        for j in 1..=k {
            next[j] = &prev[j - 1] + &prev[j] * BigUint::from(j);
        }
        prev = next;
    }
    prev[k].clone()
}

/// A partition of an integer: weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerPartition {
    parts: Vec<usize>,
}

impl IntegerPartition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::Parse("integer partition needs positive parts".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(IntegerPartition { parts })
    }

    fn from_sorted(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        IntegerPartition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The integer being partitioned.
    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Fills blocks of the given sizes left to right with consecutive
    /// integers, largest block first (`cr1` order).
    pub fn consecutive_partition(&self) -> Result<SetPartition> {
        let n = self.n();
        check_ground(n)?;
        let mut start = 0;
        let mut masks = Vec::with_capacity(self.parts.len());
        for &p in &self.parts {
            masks.push(full_mask(p) << start);
            start += p;
        }
        Ok(SetPartition::from_masks(n, masks)?.to_cr1())
    }
}

impl fmt::Display for IntegerPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for IntegerPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        IntegerPartition::new(parts)
    }
}

impl Serialize for IntegerPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}
