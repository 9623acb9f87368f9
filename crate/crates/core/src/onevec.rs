//! Binary-matrix encodings of set partitions and the maps linking them to
//! multi-index partitions.
//!
//! A [`OneVecPartition`] of order `n` has one `1` per row; column `j` is the
//! indicator of the `j`-th block in `cr2` order. A [`LabelingRule`] collapses
//! `|i|` dummy variables back onto the `n` original ones, interval by
//! interval.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::linalg::{self, Q};
use crate::multiindex::{MultiIndex, MultiIndexPartition};
use crate::partition::{bits, check_ground, check_same_n, full_mask, SetPartition, MAX_ELEMENTS};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OneVecPartition {
    n: usize,
    columns: Vec<u32>,
}

impl OneVecPartition {
    /// Builds the matrix from 0/1 columns of length `n`. Columns are put in
    /// `cr2` order.
    pub fn from_columns(columns: &[Vec<u8>]) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        let mut masks = Vec::with_capacity(columns.len());
        for col in columns {
            if col.len() != n {
                return Err(Error::MalformedMatrix(format!(
                    "column lengths differ ({} vs {n})",
                    col.len()
                )));
            }
            let mut mask = 0u32;
            for (t, &x) in col.iter().enumerate() {
                match x {
                    0 => {}
                    1 => mask |= 1 << t,
                    _ => return Err(Error::MalformedMatrix(format!("entry {x} is not binary"))),
                }
            }
            masks.push(mask);
        }
        Self::from_masks(n, masks)
    }

    /// Builds the matrix from an `n × m` row-major 0/1 array.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::MalformedMatrix("ragged rows".into()));
        }
        let columns: Vec<Vec<u8>> = (0..m).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Self::from_columns(&columns)
    }

    pub(crate) fn from_masks(n: usize, mut masks: Vec<u32>) -> Result<Self> {
        if n == 0 || n > MAX_ELEMENTS {
            return Err(Error::MalformedMatrix(format!(
                "order {n} outside 1..={MAX_ELEMENTS}"
            )));
        }
        if masks.contains(&0) {
            return Err(Error::MalformedMatrix("zero column".into()));
        }
        for t in 0..n {
            let ones = masks.iter().filter(|&&m| m >> t & 1 == 1).count();
            if ones != 1 {
                return Err(Error::MalformedMatrix(format!("row {} has {ones} ones", t + 1)));
            }
        }
        masks.sort_unstable_by_key(|m| m.trailing_zeros());
        Ok(OneVecPartition { n, columns: masks })
    }

    /// Order (number of rows).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Size (number of columns).
    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub(crate) fn masks(&self) -> &[u32] {
        &self.columns
    }

    pub fn columns(&self) -> Vec<Vec<u8>> {
        self.columns
            .iter()
            .map(|&c| (0..self.n).map(|t| (c >> t & 1) as u8).collect())
            .collect()
    }

    /// Row-major `n × m` matrix.
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n)
            .map(|t| self.columns.iter().map(|&c| (c >> t & 1) as u8).collect())
            .collect()
    }

    /// Columns as multi-indexes of arity `n`.
    pub fn column_indices(&self) -> Vec<MultiIndex> {
        self.columns.iter().map(|&c| MultiIndex::from_mask(self.n, c)).collect()
    }

    pub fn to_partition(&self) -> SetPartition {
        SetPartition::from_cr2_masks(self.n, self.columns.clone())
    }
}

impl fmt::Display for OneVecPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, &c) in self.columns.iter().enumerate() {
            if j > 0 {
                f.write_str("|")?;
            }
            for t in 0..self.n {
                f.write_str(if c >> t & 1 == 1 { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

/// Parses columns of 0/1 digits separated by `|`, e.g. `1000|0111`.
impl FromStr for OneVecPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let columns = s
            .split('|')
            .map(|col| {
                col.trim()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0u8),
                        '1' => Ok(1u8),
                        _ => Err(Error::Parse(format!("bad matrix digit {c:?} in {s:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        OneVecPartition::from_columns(&columns)
    }
}

pub fn to_onevec(p: &SetPartition) -> OneVecPartition {
    OneVecPartition {
        n: p.n(),
        columns: p.cr2_masks().into_owned(),
    }
}

pub fn from_onevec(l: &OneVecPartition) -> SetPartition {
    l.to_partition()
}

/// Basis of `V_A ∩ V_B`, from the nullspace of `[A | −B]`.
pub fn span_meet(a: &OneVecPartition, b: &OneVecPartition) -> Result<Vec<Vec<Q>>> {
    check_same_n(a.n, b.n)?;
    let (ma, mb) = (a.m(), b.m());
    let rows: Vec<Vec<Q>> = (0..a.n)
        .map(|t| {
            let mut row = vec![Q::zero(); ma + mb];
            for (j, &c) in a.columns.iter().enumerate() {
                if c >> t & 1 == 1 {
                    row[j] = Q::from_integer(1);
                }
            }
            for (j, &c) in b.columns.iter().enumerate() {
                if c >> t & 1 == 1 {
                    row[ma + j] = Q::from_integer(-1);
                }
            }
            row
        })
        .collect();
    let null = linalg::nullspace(rows, ma + mb);
    Ok(null
        .into_iter()
        .map(|v| {
            (0..a.n)
                .map(|t| {
                    a.columns
                        .iter()
                        .zip(&v)
                        .filter(|(c, _)| *c >> t & 1 == 1)
                        .fold(Q::zero(), |s, (_, x)| s + x)
                })
                .collect()
        })
        .collect())
}

/// Recovers the partition whose column span is spanned by `basis`: two rows
/// share a block exactly when every basis vector agrees on them.
pub fn partition_from_span(n: usize, basis: &[Vec<Q>]) -> Result<SetPartition> {
    check_ground(n)?;
    if let Some(v) = basis.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch { left: n, right: v.len() });
    }
    let mut groups: FxHashMap<Vec<Q>, u32> = FxHashMap::default();
    for t in 0..n {
        let key: Vec<Q> = basis.iter().map(|v| v[t]).collect();
        *groups.entry(key).or_default() |= 1 << t;
    }
    SetPartition::from_masks(n, groups.into_values().collect())
}

/// `V_A ∩ V_B = V_{1_n}`.
pub fn is_complementary_onevec(a: &OneVecPartition, b: &OneVecPartition) -> Result<bool> {
    Ok(span_meet(a, b)?.len() == 1)
}

/// `M_{ij} = |B_i ∩ C_j|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntersectionMatrix {
    rows: Vec<Vec<u32>>,
}

impl IntersectionMatrix {
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.rows.first().map_or(0, Vec::len))
    }

    /// Rows sorted descending, then columns sorted descending.
    fn sorted(&self) -> Vec<Vec<u32>> {
        let mut rows = self.rows.clone();
        rows.sort_unstable_by(|a, b| b.cmp(a));
        let (k, l) = self.shape();
        let mut cols: Vec<Vec<u32>> = (0..l).map(|j| (0..k).map(|i| rows[i][j]).collect()).collect();
        cols.sort_unstable_by(|a, b| b.cmp(a));
        (0..k).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
    }

    /// Equal up to row and column permutations.
    pub fn equivalent(&self, other: &IntersectionMatrix) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        if self.sorted() == other.sorted() {
            return true;
        }
        let mut sa: Vec<Vec<u32>> = self.rows.iter().map(|r| sorted_desc(r)).collect();
        let mut sb: Vec<Vec<u32>> = other.rows.iter().map(|r| sorted_desc(r)).collect();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return false;
        }
        let mut used = vec![false; other.rows.len()];
        let mut image = Vec::with_capacity(self.rows.len());
        self.match_rows(other, &mut used, &mut image)
    }

    // Assigns rows of `self` to rows of `other` one at a time, keeping the
    // multisets of partial columns equal.
    fn match_rows(&self, other: &IntersectionMatrix, used: &mut [bool], image: &mut Vec<usize>) -> bool {
        let t = image.len();
        if t == self.rows.len() {
            return true;
        }
        let want = sorted_desc(&self.rows[t]);
        for r in 0..other.rows.len() {
            if used[r] || sorted_desc(&other.rows[r]) != want {
                continue;
            }
            image.push(r);
            if self.partial_columns_match(other, image) {
                used[r] = true;
                if self.match_rows(other, used, image) {
                    return true;
                }
                used[r] = false;
            }
            image.pop();
        }
        false
    }

    fn partial_columns_match(&self, other: &IntersectionMatrix, image: &[usize]) -> bool {
        let l = self.shape().1;
        let mut a: Vec<Vec<u32>> = (0..l)
            .map(|j| (0..image.len()).map(|i| self.rows[i][j]).collect())
            .collect();
        let mut b: Vec<Vec<u32>> = (0..l)
            .map(|j| image.iter().map(|&r| other.rows[r][j]).collect())
            .collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

fn sorted_desc(v: &[u32]) -> Vec<u32> {
    let mut v = v.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

impl fmt::Display for IntersectionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            f.write_str(&cells.join(" "))?;
        }
        Ok(())
    }
}

/// `Λ_p^T Λ_q` in the stored block orders.
pub fn intersection_matrix(p: &SetPartition, q: &SetPartition) -> Result<IntersectionMatrix> {
    check_same_n(p.n(), q.n())?;
    Ok(IntersectionMatrix {
        rows: p
            .masks()
            .iter()
            .map(|&b| q.masks().iter().map(|&c| (b & c).count_ones()).collect())
            .collect(),
    })
}

/// `p` and `q` meet `base` in the same pattern, up to relabeling blocks.
pub fn same_equivalence_class(base: &SetPartition, p: &SetPartition, q: &SetPartition) -> Result<bool> {
    Ok(intersection_matrix(p, base)?.equivalent(&intersection_matrix(q, base)?))
}

/// `σ_i`: dummy index `t` maps to variable `k` when `t` lies in the `k`-th
/// interval of lengths `i_1, i_2, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelingRule {
    i: MultiIndex,
    intervals: Vec<u32>,
}

impl LabelingRule {
    pub fn new(i: &MultiIndex) -> Result<Self> {
        let p = i.order();
        if p == 0 {
            return Err(Error::EmptyTarget);
        }
        if p > MAX_ELEMENTS {
            return Err(Error::OutOfBounds {
                what: "|i|",
                value: p,
                min: 1,
                max: MAX_ELEMENTS,
            });
        }
        let mut start = 0;
        let intervals = i
            .entries()
            .iter()
            .map(|&len| {
                let mask = full_mask(len as usize) << start;
                start += len as usize;
                mask
            })
            .collect();
        Ok(LabelingRule { i: i.clone(), intervals })
    }

    pub fn target(&self) -> &MultiIndex {
        &self.i
    }

    /// `|i|`, the number of dummy variables.
    pub fn p(&self) -> usize {
        self.i.order()
    }

    /// `σ(t)` for a 1-based dummy index; returns a 1-based variable.
    pub fn sigma(&self, t: usize) -> usize {
        assert!((1..=self.p()).contains(&t), "dummy index {t} out of range");
        self.intervals
            .iter()
            .position(|&m| m >> (t - 1) & 1 == 1)
            .map(|k| k + 1)
            .expect("intervals cover 1..=p")
    }

    /// `σ⁻¹(k)` as 1-based dummy indices.
    pub fn preimage(&self, k: usize) -> Vec<usize> {
        bits(self.intervals[k - 1]).map(|t| t + 1).collect()
    }

    pub(crate) fn interval_masks(&self) -> &[u32] {
        &self.intervals
    }

    /// Collapses a label over the dummy variables: entry `k` is the sum of
    /// the entries indexed by `σ⁻¹(k)`.
    pub fn collapse(&self, label: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(label.arity(), self.p());
        let e = label.entries();
        MultiIndex::new(
            self.intervals
                .iter()
                .map(|&m| bits(m).map(|t| e[t]).sum())
                .collect(),
        )
    }
}

/// `φ`: distributes the rows of each interval `σ⁻¹(k)` in order, giving
/// `(λ_q)_k` consecutive rows to the `q`-th column.
pub fn canonical_phi(l: &MultiIndexPartition) -> Result<OneVecPartition> {
    let rule = LabelingRule::new(l.target())?;
    let cols = l.expanded();
    let mut masks = vec![0u32; cols.len()];
    for (k, &interval) in rule.interval_masks().iter().enumerate() {
        let mut next = interval.trailing_zeros();
        for (q, c) in cols.iter().enumerate() {
            for _ in 0..c.entries()[k] {
                masks[q] |= 1 << next;
                next += 1;
            }
        }
    }
    OneVecPartition::from_masks(rule.p(), masks)
}

/// `Φ_σ`: `(λ_q)_k = Σ_{t ∈ σ⁻¹(k)} (s_q)_t`.
pub fn reverse_phi(l: &OneVecPartition, s: &LabelingRule) -> Result<MultiIndexPartition> {
    check_same_n(l.n, s.p())?;
    Ok(MultiIndexPartition::new(reverse_columns(&l.columns, s.interval_masks()))
        .expect("columns of a 1-partition are non-zero"))
}

pub(crate) fn reverse_columns(columns: &[u32], intervals: &[u32]) -> Vec<MultiIndex> {
    columns
        .iter()
        .map(|&c| MultiIndex::new(intervals.iter().map(|&m| (c & m).count_ones()).collect()))
        .collect()
}

/// All `Λ_π` of order `|i|` with `Φ_σ(Λ_π) = Λ`, in the `cr2` partition
/// order.
pub fn phi_preimage(l: &MultiIndexPartition, s: &LabelingRule) -> Result<Vec<OneVecPartition>> {
    if l.target() != s.target() {
        return Err(Error::DimensionMismatch {
            left: l.target().order(),
            right: s.p(),
        });
    }
    let cols = l.expanded();
    let mut masks = vec![0u32; cols.len()];
    let mut out = Vec::new();
    assign(&cols, s.interval_masks(), 0, 0, s.interval_masks()[0], &mut masks, &mut out);
    let mut parts: Vec<SetPartition> = out
        .into_iter()
        .map(|m| SetPartition::from_masks(s.p(), m).expect("assignment covers every row"))
        .collect();
    parts.sort();
    Ok(parts.iter().map(to_onevec).collect())
}

// Variable `k`, column `q`: choose `(c_q)_k` rows out of what is left of the
// `k`-th interval. Identical columns are kept in increasing order of their
// least row so each unordered assignment is produced once.
fn assign(
    cols: &[MultiIndex],
    intervals: &[u32],
    k: usize,
    q: usize,
    avail: u32,
    masks: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if q == cols.len() {
        debug_assert_eq!(avail, 0);
        if k + 1 == intervals.len() {
            let ordered = (1..cols.len())
                .all(|j| cols[j] != cols[j - 1] || masks[j - 1].trailing_zeros() < masks[j].trailing_zeros());
            if ordered {
                out.push(masks.clone());
            }
        } else {
            assign(cols, intervals, k + 1, 0, intervals[k + 1], masks, out);
        }
        return;
    }
    let need = cols[q].entries()[k];
    if need == 0 {
        assign(cols, intervals, k, q + 1, avail, masks, out);
        return;
    }
    // Submasks of `avail` with `need` bits, increasing.
    let mut sub = 0u32;
    loop {
        sub = sub.wrapping_sub(avail) & avail;
        if sub == 0 {
            break;
        }
        if sub.count_ones() == need {
            masks[q] |= sub;
            assign(cols, intervals, k, q + 1, avail & !sub, masks, out);
            masks[q] &= !sub;
        }
    }
}
