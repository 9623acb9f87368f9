//! Exact moment and cumulant algebra.
//!
//! A [`Polynomial`] is an integer combination of monomials, each a multiset
//! of multi-index symbols. The marker type fixes whether the symbols are
//! cumulants `κ` or moments `μ`.

use std::collections::BTreeMap;
use std::cmp::Ordering;
use std::fmt;
use std::marker::PhantomData;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::csp::{self, split_meet_coefficients, Algorithm};
use crate::error::{Error, Result};
use crate::multiindex::{d_coefficient, enumerate_multiindex_partitions, factorial, MultiIndex, MultiIndexPartition};
use crate::onevec::{canonical_phi, reverse_columns, LabelingRule, OneVecPartition};
use crate::partition::{bits, for_each_partition_of, full_mask, partition_key, SetPartition};

pub trait Symbol: Clone + fmt::Debug + Default + PartialEq + Eq {
    const SYMBOL: &'static str;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Cumulant;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Moment;

impl Symbol for Cumulant {
    const SYMBOL: &'static str = "κ";
}

impl Symbol for Moment {
    const SYMBOL: &'static str = "μ";
}

/// A product of symbols: distinct multi-indexes in decreasing order, each
/// with a positive power.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    factors: Vec<(MultiIndex, u32)>,
}

impl Monomial {
    pub fn new(mut factors: Vec<MultiIndex>) -> Self {
        factors.sort_unstable_by(|a, b| b.cmp(a));
        let mut grouped: Vec<(MultiIndex, u32)> = Vec::with_capacity(factors.len());
        for f in factors {
            match grouped.last_mut() {
                Some((last, r)) if *last == f => *r += 1,
                _ => grouped.push((f, 1)),
            }
        }
        Monomial { factors: grouped }
    }

    /// The empty product.
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn from_partition(l: &MultiIndexPartition) -> Self {
        Monomial {
            factors: l.columns().to_vec(),
        }
    }

    pub fn factors(&self) -> &[(MultiIndex, u32)] {
        &self.factors
    }

    /// Factors with repeats expanded, decreasing.
    pub fn expanded(&self) -> Vec<MultiIndex> {
        self.factors
            .iter()
            .flat_map(|(f, r)| std::iter::repeat_n(f.clone(), *r as usize))
            .collect()
    }

    /// Number of factors counted with multiplicity.
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|(_, r)| *r as usize).sum()
    }

    /// Componentwise sum of the factors, weighted by power.
    pub fn weight(&self) -> Option<MultiIndex> {
        let (first, _) = self.factors.first()?;
        let mut w = vec![0u32; first.arity()];
        for (f, r) in &self.factors {
            for (x, y) in w.iter_mut().zip(f.entries()) {
                *x += r * y;
            }
        }
        Some(MultiIndex::new(w))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { factors: out }
    }

    /// Replaces every factor label through `f`, then re-normalises.
    pub fn map_labels(&self, mut f: impl FnMut(&MultiIndex) -> MultiIndex) -> Monomial {
        Monomial::new(
            self.factors
                .iter()
                .flat_map(|(x, r)| std::iter::repeat_n(f(x), *r as usize))
                .collect(),
        )
    }

    pub(crate) fn fmt_with(&self, symbol: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (x, r)) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{symbol}[{x}]")?;
            if *r > 1 {
                write!(f, "^{r}")?;
            }
        }
        Ok(())
    }
}

/// Fewer factors first; among equal degrees, larger factors first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.factors.cmp(&self.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial<K: Symbol> {
    arity: usize,
    terms: BTreeMap<Monomial, BigInt>,
    kind: PhantomData<K>,
}

pub type CumulantPolynomial = Polynomial<Cumulant>;
pub type MomentPolynomial = Polynomial<Moment>;

impl<K: Symbol> Polynomial<K> {
    pub fn zero(arity: usize) -> Self {
        Polynomial {
            arity,
            terms: BTreeMap::new(),
            kind: PhantomData,
        }
    }

    /// The constant `1`.
    pub fn one(arity: usize) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(Monomial::one(), BigInt::one());
        p
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = Self::zero(arity);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// A single product with coefficient one.
    pub fn single(factors: Vec<MultiIndex>) -> Self {
        let arity = factors.first().map_or(0, MultiIndex::arity);
        Self::from_terms(arity, [(Monomial::new(factors), BigInt::one())])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, scale: &BigInt) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * scale);
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: FxHashMap<Monomial, BigInt> = FxHashMap::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                *acc.entry(a.mul(b)).or_default() += ca * cb;
            }
        }
        Self::from_terms(self.arity, acc)
    }

    /// Replaces each symbol by a polynomial of another kind.
    pub fn substitute<L: Symbol>(&self, mut f: impl FnMut(&MultiIndex) -> Result<Polynomial<L>>) -> Result<Polynomial<L>> {
        let mut out = Polynomial::<L>::zero(self.arity);
        for (m, c) in &self.terms {
            let mut prod = Polynomial::<L>::one(self.arity);
            for (x, r) in m.factors() {
                let e = f(x)?;
                for _ in 0..*r {
                    prod = prod.mul(&e);
                }
            }
            out.add_scaled(&prod, c);
        }
        Ok(out)
    }
}

impl MomentPolynomial {
    pub fn to_cumulants(&self) -> Result<CumulantPolynomial> {
        let mut memo: FxHashMap<MultiIndex, CumulantPolynomial> = FxHashMap::default();
        self.substitute(|x| {
            if let Some(p) = memo.get(x) {
                return Ok(p.clone());
            }
            let p = moments_to_cumulants(x)?;
            memo.insert(x.clone(), p.clone());
            Ok(p)
        })
    }
}

impl CumulantPolynomial {
    pub fn to_moments(&self) -> Result<MomentPolynomial> {
        let mut memo: FxHashMap<MultiIndex, MomentPolynomial> = FxHashMap::default();
        self.substitute(|x| {
            if let Some(p) = memo.get(x) {
                return Ok(p.clone());
            }
            let p = cumulants_to_moments(x)?;
            memo.insert(x.clone(), p.clone());
            Ok(p)
        })
    }
}

impl<K: Symbol> fmt::Display for Polynomial<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.sign() == Sign::Minus;
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.factors.is_empty() {
                write!(f, "{abs}")?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{abs} ")?;
            }
            m.fmt_with(K::SYMBOL, f)?;
        }
        Ok(())
    }
}

pub(crate) struct Coeff<'a>(pub &'a BigInt);

impl Serialize for Coeff<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.collect_str(self.0),
        }
    }
}

struct Term<'a>(&'a Monomial, &'a BigInt);

impl Serialize for Term<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("coeff", &Coeff(self.1))?;
        map.serialize_entry("factors", &self.0.expanded())?;
        map.end()
    }
}

/// `{"terms": [{"coeff": c, "factors": [[..], ..]}, ..]}`.
impl<K: Symbol> Serialize for Polynomial<K> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<Term<'_>> = self.terms.iter().map(|(m, c)| Term(m, c)).collect();
        let mut st = s.serialize_struct("Polynomial", 1)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// `(-1)^{l-1} (l-1)!`, the Möbius value `μ(ρ, 1)` for a partition with `l`
/// blocks.
pub(crate) fn mobius_top(l: usize) -> BigInt {
    let f = BigInt::from_biguint(Sign::Plus, factorial(l - 1));
    if l % 2 == 1 {
        f
    } else {
        -f
    }
}

/// `μ_i = Σ_{Λ ⊢ i} d_Λ κ(Λ)`.
pub fn moments_to_cumulants(i: &MultiIndex) -> Result<CumulantPolynomial> {
    let mut out = CumulantPolynomial::zero(i.arity());
    for l in enumerate_multiindex_partitions(i)? {
        let d = BigInt::from_biguint(Sign::Plus, d_coefficient(&l));
        out.add_term(Monomial::from_partition(&l), d);
    }
    Ok(out)
}

/// `κ_i = Σ_{Λ ⊢ i} (-1)^{l(Λ)-1} (l(Λ)-1)! d_Λ μ(Λ)`.
pub fn cumulants_to_moments(i: &MultiIndex) -> Result<MomentPolynomial> {
    let mut out = MomentPolynomial::zero(i.arity());
    for l in enumerate_multiindex_partitions(i)? {
        let d = BigInt::from_biguint(Sign::Plus, d_coefficient(&l));
        out.add_term(Monomial::from_partition(&l), d * mobius_top(l.len()));
    }
    Ok(out)
}

fn block_monomial(n: usize, blocks: &[u32]) -> Monomial {
    Monomial::new(blocks.iter().map(|&b| MultiIndex::from_mask(n, b)).collect())
}

/// `𝔎(π) = Σ_{π̃ complementary to π} Π_{B ∈ π̃} κ(B)`, with complementary
/// partitions listed by the two-block method.
pub fn generalized_cumulant(p: &SetPartition) -> Result<CumulantPolynomial> {
    generalized_cumulant_with(p, Algorithm::Twoblock)
}

pub fn generalized_cumulant_with(p: &SetPartition, algorithm: Algorithm) -> Result<CumulantPolynomial> {
    let n = p.n();
    let list = csp::complementary(p, algorithm)?;
    Ok(CumulantPolynomial::from_terms(
        n,
        list.iter().map(|q| (block_monomial(n, q.masks()), BigInt::one())),
    ))
}

/// Full-lattice sum minus the sum over partitions not complementary to `p`.
pub fn generalized_cumulant_subtractive(p: &SetPartition) -> Result<CumulantPolynomial> {
    let n = p.n();
    csp::check_enumerable(n)?;
    let excluded = csp::not_complementary_keys(p);
    let mut full = CumulantPolynomial::zero(n);
    let mut tail = CumulantPolynomial::zero(n);
    for_each_partition_of(full_mask(n), &mut |blocks| {
        full.add_term(block_monomial(n, blocks), BigInt::one());
        if excluded.contains(&partition_key(blocks)) {
            tail.add_term(block_monomial(n, blocks), BigInt::one());
        }
    });
    full.add_scaled(&tail, &-BigInt::one());
    Ok(full)
}

/// `𝔎_Λ = Σ_{Λ̃} a_Λ̃ κ(Λ̃)`: lists the partitions complementary to `φ(Λ)`
/// and groups them by their image under the reverse transformation.
pub fn generalized_mv_cumulant(l: &MultiIndexPartition) -> Result<CumulantPolynomial> {
    let rule = LabelingRule::new(l.target())?;
    let phi = canonical_phi(l)?;
    let list = csp::complementary(&phi.to_partition(), Algorithm::Twoblock)?;
    let mut counts: FxHashMap<Monomial, usize> = FxHashMap::default();
    for q in &list {
        let cols = reverse_columns(q.masks(), rule.interval_masks());
        *counts.entry(Monomial::new(cols)).or_default() += 1;
    }
    Ok(CumulantPolynomial::from_terms(
        l.arity(),
        counts.into_iter().map(|(m, c)| (m, BigInt::from(c))),
    ))
}

/// Same value as [`generalized_mv_cumulant`], computed by inclusion–exclusion
/// over the two-block splits of the columns: a split group `ρ` contributes
/// `Π_{R ∈ ρ} μ(v_R)` expanded into cumulants, where `v_R` sums the columns
/// in `R`.
pub fn generalized_mv_cumulant_optimized(l: &MultiIndexPartition) -> Result<CumulantPolynomial> {
    let cols = l.expanded();
    if cols.len() == 1 {
        return moments_to_cumulants(l.target());
    }
    let mut memo: FxHashMap<MultiIndex, CumulantPolynomial> = FxHashMap::default();
    let mut out = CumulantPolynomial::zero(l.arity());
    for (rho, coeff) in split_meet_coefficients(cols.len()).iter() {
        let mut prod = CumulantPolynomial::one(l.arity());
        for &r in rho {
            let v = bits(r).fold(MultiIndex::zeros(l.arity()), |acc, j| &acc + &cols[j]);
            let e = match memo.get(&v) {
                Some(e) => e.clone(),
                None => {
                    let e = moments_to_cumulants(&v)?;
                    memo.insert(v, e.clone());
                    e
                }
            };
            prod = prod.mul(&e);
        }
        out.add_scaled(&prod, &BigInt::from(*coeff));
    }
    Ok(out)
}

/// `Σ_{Λ̃ coarser than Λ_π} (-1)^{l(Λ̃)-1} (l(Λ̃)-1)! μ(Λ̃)`: the generalized
/// cumulant written in joint moments.
pub fn generalized_cumulant_in_moments(l: &OneVecPartition) -> MomentPolynomial {
    let n = l.n();
    let cols = l.masks();
    let mut out = MomentPolynomial::zero(n);
    for_each_partition_of(full_mask(cols.len()), &mut |sigma| {
        let merged: Vec<MultiIndex> = sigma
            .iter()
            .map(|&s| MultiIndex::from_mask(n, bits(s).fold(0, |acc, j| acc | cols[j])))
            .collect();
        out.add_term(Monomial::new(merged), mobius_top(sigma.len()));
    });
    out
}

/// `μ(Λ_π) = Σ_{Λ finer than Λ_π} κ(Λ)`.
pub fn moment_product_expansion(l: &OneVecPartition) -> Result<CumulantPolynomial> {
    let mut out = CumulantPolynomial::one(l.n());
    for col in l.column_indices() {
        out = out.mul(&moments_to_cumulants(&col)?);
    }
    Ok(out)
}

/// `Σ_{Λ̃ coarser than Λ_π} (-1)^{l(Λ̃)-1} (l(Λ̃)-1)!`; equals 1 for the
/// one-column matrix and 0 otherwise.
pub fn alternating_sum_check(l: &OneVecPartition) -> BigInt {
    let mut total = BigInt::zero();
    for_each_partition_of(full_mask(l.m()), &mut |sigma| total += mobius_top(sigma.len()));
    total
}

/// Reads the terms of a cumulant polynomial over `1̄_n` back as set
/// partitions, requiring every coefficient to be one.
pub(crate) fn terms_as_partitions(poly: &CumulantPolynomial) -> Result<Vec<SetPartition>> {
    let n = poly.arity();
    let mut out = Vec::with_capacity(poly.len());
    for (m, c) in poly.terms() {
        if !c.is_one() {
            return Err(Error::AlgebraConsistency(format!("coefficient {c} on {}", Display(m))));
        }
        let mut masks = Vec::with_capacity(m.factors().len());
        for (x, r) in m.factors() {
            if *r != 1 || x.entries().iter().any(|&e| e > 1) {
                return Err(Error::AlgebraConsistency(format!("non-binary term {}", Display(m))));
            }
            masks.push(x.entries().iter().enumerate().fold(0u32, |acc, (t, &e)| acc | e << t));
        }
        out.push(SetPartition::from_masks(n, masks).map_err(|e| Error::AlgebraConsistency(e.to_string()))?);
    }
    out.sort();
    Ok(out)
}

struct Display<'a>(&'a Monomial);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_with(Cumulant::SYMBOL, f)
    }
}
