//! Power sums, polykays and unbiased estimators of generalized multivariate
//! cumulants.
//!
//! A [`PowerSumPolynomial`] is `Σ c_j(N) S(m_j) / N^{(r)}` with integer
//! polynomials `c_j` in the sample size `N`, products of power sums `S(m_j)`
//! and the falling factorial `N^{(r)} = N (N-1) … (N-r+1)`. The form is kept
//! reduced: `r` is lowered while every `c_j` vanishes at `N = r - 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::Path;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use crate::cumulant::{cumulants_to_moments, mobius_top, Monomial, MomentPolynomial};
use crate::error::{Error, Result};
use crate::multiindex::{MultiIndex, MultiIndexPartition};
use crate::onevec::{canonical_phi, LabelingRule, OneVecPartition};
use crate::partition::{bits, for_each_partition_of, full_mask, MAX_ELEMENTS};

/// Integer polynomial in `N`, coefficients from the constant term up.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NPoly(Vec<BigInt>);

impl NPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        NPoly(coeffs)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        NPoly::new(vec![c.into()])
    }

    /// `N - a`.
    pub fn linear(a: i64) -> Self {
        NPoly::new(vec![BigInt::from(-a), BigInt::one()])
    }

    /// `N (N-1) … (N-r+1)`.
    pub fn falling_factorial(r: usize) -> Self {
        (0..r as i64).fold(NPoly::constant(1), |acc, k| acc.mul(&NPoly::linear(k)))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, other: &NPoly) -> NPoly {
        let len = self.0.len().max(other.0.len());
        let zero = BigInt::zero();
        NPoly::new(
            (0..len)
                .map(|k| self.0.get(k).unwrap_or(&zero) + other.0.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &NPoly) -> NPoly {
        if self.is_zero() || other.is_zero() {
            return NPoly::default();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        NPoly::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> NPoly {
        NPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * n + c)
    }

    /// Exact quotient by `N - a`; `None` when `a` is not a root.
    pub fn div_linear(&self, a: i64) -> Option<NPoly> {
        if self.is_zero() {
            return Some(NPoly::default());
        }
        let a = BigInt::from(a);
        let d = self.0.len() - 1;
        let mut q = vec![BigInt::zero(); d];
        let mut carry = BigInt::zero();
        for k in (0..=d).rev() {
            let v = &self.0[k] + &carry;
            if k == 0 {
                return v.is_zero().then(|| NPoly::new(q));
            }
            carry = &v * &a;
            q[k - 1] = v;
        }
        unreachable!()
    }

    fn leading_negative(&self) -> bool {
        self.0.last().is_some_and(|c| c.sign() == Sign::Minus)
    }

    fn term_count(&self) -> usize {
        self.0.iter().filter(|c| !c.is_zero()).count()
    }
}

impl fmt::Display for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.sign() == Sign::Minus;
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let abs = c.abs();
            match k {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs} ")?;
                    }
                    f.write_str("N")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSumPolynomial {
    arity: usize,
    order: usize,
    terms: BTreeMap<Monomial, NPoly>,
}

impl PowerSumPolynomial {
    pub fn zero(arity: usize) -> Self {
        PowerSumPolynomial {
            arity,
            order: 0,
            terms: BTreeMap::new(),
        }
    }

    /// `Σ c_j(N) S(m_j) / N^{(order)}`, reduced.
    pub fn from_terms(arity: usize, order: usize, terms: impl IntoIterator<Item = (Monomial, NPoly)>) -> Self {
        let mut acc: BTreeMap<Monomial, NPoly> = BTreeMap::new();
        for (m, c) in terms {
            let e = acc.entry(m).or_default();
            *e = e.add(&c);
        }
        let mut out = PowerSumPolynomial { arity, order, terms: acc };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        if self.terms.is_empty() {
            self.order = 0;
            return;
        }
        while self.order > 0 {
            let root = self.order as i64 - 1;
            let divided: Option<Vec<NPoly>> = self.terms.values().map(|c| c.div_linear(root)).collect();
            match divided {
                Some(qs) => {
                    for (slot, q) in self.terms.values_mut().zip(qs) {
                        *slot = q;
                    }
                    self.order -= 1;
                }
                None => break,
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `r` in the denominator `N^{(r)}`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &NPoly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn lifted(&self, order: usize) -> impl Iterator<Item = (Monomial, NPoly)> + '_ {
        let factor = (self.order..order).fold(NPoly::constant(1), |acc, k| acc.mul(&NPoly::linear(k as i64)));
        self.terms.iter().map(move |(m, c)| (m.clone(), c.mul(&factor)))
    }

    pub fn add(&self, other: &PowerSumPolynomial) -> PowerSumPolynomial {
        let order = self.order.max(other.order);
        PowerSumPolynomial::from_terms(self.arity, order, self.lifted(order).chain(other.lifted(order)))
    }

    pub fn scale(&self, c: &BigInt) -> PowerSumPolynomial {
        PowerSumPolynomial::from_terms(self.arity, self.order, self.terms.iter().map(|(m, p)| (m.clone(), p.scale(c))))
    }

    /// Rewrites every power-sum label, merging terms that collide.
    pub fn map_labels(&self, arity: usize, mut f: impl FnMut(&MultiIndex) -> MultiIndex) -> PowerSumPolynomial {
        PowerSumPolynomial::from_terms(arity, self.order, self.terms.iter().map(|(m, c)| (m.map_labels(&mut f), c.clone())))
    }

    /// Evaluates at `N = data.rows()` with the power sums of `data`.
    pub fn evaluate(&self, data: &SampleMatrix) -> Result<f64> {
        if data.n() != self.arity {
            return Err(Error::DimensionMismatch {
                left: self.arity,
                right: data.n(),
            });
        }
        let n_rows = data.rows();
        if n_rows < self.order.max(1) {
            return Err(Error::InsufficientSample {
                required: self.order.max(1),
                actual: n_rows,
            });
        }
        let big_n = BigInt::from(n_rows);
        let mut sums: FxHashMap<&MultiIndex, f64> = FxHashMap::default();
        let mut total = Neumaier::default();
        for (m, c) in &self.terms {
            let coeff = c.eval(&big_n).to_f64().unwrap_or(f64::NAN);
            let mut prod = coeff;
            for (label, r) in m.factors() {
                let s = match sums.get(label) {
                    Some(&s) => s,
                    None => {
                        let s = power_sum(data, label)?;
                        sums.insert(label, s);
                        s
                    }
                };
                prod *= s.powi(*r as i32);
            }
            total.add(prod);
        }
        let denom = NPoly::falling_factorial(self.order).eval(&big_n).to_f64().unwrap_or(f64::NAN);
        Ok(total.sum() / denom)
    }
}

impl fmt::Display for PowerSumPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let wrap = self.order > 0 && (self.terms.len() > 1 || self.terms.values().any(|c| c.term_count() > 1));
        if wrap {
            f.write_str("(")?;
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.leading_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let c = if neg { c.scale(&-BigInt::one()) } else { c.clone() };
            let is_one = c.coeffs().len() == 1 && c.coeffs()[0].is_one();
            if c.term_count() > 1 {
                write!(f, "({c}) ")?;
            } else if !is_one {
                write!(f, "{c} ")?;
            }
            m.fmt_with("S", f)?;
        }
        if wrap {
            f.write_str(")")?;
        }
        match self.order {
            0 => Ok(()),
            1 => f.write_str(" / N"),
            r => {
                f.write_str(" / (N")?;
                for k in 1..r {
                    write!(f, " (N - {k})")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Neumaier's compensated summation.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `N × n` sample: rows are observations, columns are variables.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    names: Option<Vec<String>>,
}

impl SampleMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::MalformedMatrix("sample needs at least one row and one column".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * cols);
        for (l, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::MalformedMatrix(format!(
                    "row {} has {} values, expected {cols}",
                    l + 1,
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::MalformedMatrix(format!("non-finite value at row {}, column {}", l + 1, j + 1)));
            }
            values.extend_from_slice(row);
        }
        Ok(SampleMatrix {
            rows: rows.len(),
            cols,
            values,
            names: None,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.cols {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    /// `N`, the number of observations.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// `n`, the number of variables.
    pub fn n(&self) -> usize {
        self.cols
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }
}

/// `S_t = Σ_l Π_j X_{j,l}^{t_j}`, with `x^0 = 1`.
pub fn power_sum(data: &SampleMatrix, t: &MultiIndex) -> Result<f64> {
    if t.arity() != data.n() {
        return Err(Error::DimensionMismatch {
            left: t.arity(),
            right: data.n(),
        });
    }
    let mut acc = Neumaier::default();
    for l in 0..data.rows() {
        let row = data.row(l);
        let term = t
            .entries()
            .iter()
            .zip(row)
            .filter(|(&e, _)| e > 0)
            .fold(1.0, |p, (&e, &x)| p * x.powi(e as i32));
        acc.add(term);
    }
    Ok(acc.sum())
}

/// The symmetric mean over pairwise distinct sample indices of
/// `Π_j X^{a_j}`, in power sums: `Σ_{π ∈ Π_r} Π_{B ∈ π} (-1)^{|B|-1}
/// (|B|-1)! S_{Σ_{j ∈ B} a_j}` over `N^{(r)}`.
pub fn distinct_index_expansion(factors: &[MultiIndex]) -> Result<PowerSumPolynomial> {
    let r = factors.len();
    let Some(first) = factors.first() else {
        return Err(Error::EmptyTarget);
    };
    let arity = first.arity();
    if let Some(f) = factors.iter().find(|f| f.arity() != arity) {
        return Err(Error::DimensionMismatch {
            left: arity,
            right: f.arity(),
        });
    }
    if r > MAX_ELEMENTS {
        return Err(Error::OutOfBounds {
            what: "r",
            value: r,
            min: 1,
            max: MAX_ELEMENTS,
        });
    }
    let mut terms = Vec::new();
    for_each_partition_of(full_mask(r), &mut |blocks| {
        let mut coeff = BigInt::one();
        let mut labels = Vec::with_capacity(blocks.len());
        for &b in blocks {
            coeff *= mobius_top(b.count_ones() as usize);
            labels.push(bits(b).fold(MultiIndex::zeros(arity), |acc, j| &acc + &factors[j]));
        }
        terms.push((Monomial::new(labels), NPoly::constant(coeff)));
    });
    Ok(PowerSumPolynomial::from_terms(arity, r, terms))
}

fn moments_to_power_sums(arity: usize, moments: &MomentPolynomial) -> Result<PowerSumPolynomial> {
    let mut out = PowerSumPolynomial::zero(arity);
    for (m, c) in moments.terms() {
        out = out.add(&distinct_index_expansion(&m.expanded())?.scale(c));
    }
    Ok(out)
}

/// Unbiased symmetric estimator of `Π_j κ(λ̃_j)`: cumulants expanded into
/// moments, each moment product replaced by its distinct-index symmetric
/// mean.
pub fn polykay(l: &MultiIndexPartition) -> Result<PowerSumPolynomial> {
    let mut prod = MomentPolynomial::one(l.arity());
    for (col, r) in l.columns() {
        let e = cumulants_to_moments(col)?;
        for _ in 0..*r {
            prod = prod.mul(&e);
        }
    }
    moments_to_power_sums(l.arity(), &prod)
}

/// Estimator of the generalized cumulant of `Λ_π`: the joint k-statistic of
/// `Z_j = Π_{t ∈ B_j} Y_t`, with each label `τ` over `Z` rewritten as
/// `Σ_j τ_j s_j` over `Y`.
pub fn estimator_generalized_cumulant(l: &OneVecPartition) -> Result<PowerSumPolynomial> {
    let m = l.m();
    let joint = polykay(&MultiIndexPartition::new(vec![MultiIndex::ones(m)])?)?;
    let cols = l.column_indices();
    Ok(joint.map_labels(l.n(), |tau| {
        tau.entries()
            .iter()
            .zip(&cols)
            .fold(MultiIndex::zeros(l.n()), |acc, (&t, c)| {
                let scaled = MultiIndex::new(c.entries().iter().map(|x| x * t).collect());
                &acc + &scaled
            })
    }))
}

/// Estimator of `𝔎_Λ`: the estimator of `φ(Λ)` over the dummy variables,
/// with each label collapsed through the labeling rule.
pub fn estimator_gmc(l: &MultiIndexPartition) -> Result<PowerSumPolynomial> {
    let rule = LabelingRule::new(l.target())?;
    let y = estimator_generalized_cumulant(&canonical_phi(l)?)?;
    Ok(y.map_labels(l.arity(), |t| rule.collapse(t)))
}

/// Evaluates `expr` on `data`.
pub fn evaluate(expr: &PowerSumPolynomial, data: &SampleMatrix) -> Result<f64> {
    expr.evaluate(data)
}

/// Reads a rectangular numeric CSV file.
pub fn ingest_csv(path: impl AsRef<Path>, has_header: bool) -> Result<SampleMatrix> {
    let file = std::fs::File::open(path)?;
    read_csv(file, has_header)
}

/// Reads a rectangular numeric CSV stream. Error coordinates are 1-based
/// line and column numbers.
pub fn read_csv<R: io::Read>(reader: R, has_header: bool) -> Result<SampleMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let csv_error = |e: csv::Error| {
        let row = e.position().map_or(0, |p| p.line() as usize);
        Error::Csv {
            row,
            column: 0,
            message: e.to_string(),
        }
    };
    let names = if has_header {
        Some(rdr.headers().map_err(csv_error)?.iter().map(str::to_string).collect::<Vec<_>>())
    } else {
        None
    };
    let mut width = names.as_ref().map(Vec::len);
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Csv {
                row: line,
                column: record.len().min(expected) + 1,
                message: format!("expected {expected} fields, found {}", record.len()),
            });
        }
        let mut row = Vec::with_capacity(expected);
        for (j, cell) in record.iter().enumerate() {
            let x: f64 = cell.parse().map_err(|_| Error::Csv {
                row: line,
                column: j + 1,
                message: format!("not a number: {cell:?}"),
            })?;
            if !x.is_finite() {
                return Err(Error::Csv {
                    row: line,
                    column: j + 1,
                    message: format!("not a finite number: {cell:?}"),
                });
            }
            row.push(x);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Csv {
            row: if has_header { 2 } else { 1 },
            column: 1,
            message: "no data rows".into(),
        });
    }
    let data = SampleMatrix::new(rows)?;
    match names {
        Some(names) => data.with_names(names),
        None => Ok(data),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mi(s: &str) -> MultiIndex {
        s.parse().unwrap()
    }

    fn mono(labels: &[&str]) -> Monomial {
        Monomial::new(labels.iter().map(|s| mi(s)).collect())
    }

    fn np(c: &[i64]) -> NPoly {
        NPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    fn lam(s: &str) -> MultiIndexPartition {
        s.parse().unwrap()
    }

    fn sample(rows: &[&[f64]]) -> SampleMatrix {
        SampleMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn random_sample(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> SampleMatrix {
        SampleMatrix::new(
            (0..rows)
                .map(|_| (0..cols).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect(),
        )
        .unwrap()
    }

    // Direct sum over ordered tuples of pairwise distinct rows.
    fn brute_distinct(data: &SampleMatrix, factors: &[MultiIndex]) -> f64 {
        fn rec(data: &SampleMatrix, factors: &[MultiIndex], used: &mut Vec<usize>) -> f64 {
            if used.len() == factors.len() {
                return used
                    .iter()
                    .zip(factors)
                    .map(|(&l, a)| {
                        a.entries()
                            .iter()
                            .enumerate()
                            .fold(1.0, |p, (j, &e)| p * data.get(l, j).powi(e as i32))
                    })
                    .product();
            }
            let mut s = 0.0;
            for l in 0..data.rows() {
                if !used.contains(&l) {
                    used.push(l);
                    s += rec(data, factors, used);
                    used.pop();
                }
            }
            s
        }
        let ff: f64 = (0..factors.len()).map(|k| (data.rows() - k) as f64).product();
        rec(data, factors, &mut Vec::new()) / ff
    }

    #[test]
    fn power_sums() {
        let d = sample(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(power_sum(&d, &mi("1,0")).unwrap(), 4.0);
        assert_eq!(power_sum(&d, &mi("1,2")).unwrap(), 52.0);
        assert_eq!(power_sum(&d, &mi("0,0")).unwrap(), 2.0);
        assert!(power_sum(&d, &mi("1")).is_err());
    }

    #[test]
    fn npoly_arithmetic() {
        let p = NPoly::falling_factorial(3);
        assert_eq!(p, np(&[0, 2, -3, 1]));
        assert_eq!(p.div_linear(2).unwrap(), NPoly::falling_factorial(2));
        assert!(p.div_linear(5).is_none());
        assert_eq!(p.eval(&BigInt::from(5)), BigInt::from(60));
        assert_eq!(np(&[-1, 1]).to_string(), "N - 1");
        assert_eq!(np(&[2, -3, 1]).to_string(), "N^2 - 3 N + 2");
    }

    #[test]
    fn distinct_index_examples() {
        let two = distinct_index_expansion(&[mi("1,0"), mi("0,1")]).unwrap();
        let want = PowerSumPolynomial::from_terms(
            2,
            2,
            [(mono(&["1,0", "0,1"]), np(&[1])), (mono(&["1,1"]), np(&[-1]))],
        );
        assert_eq!(two, want);
        let one = distinct_index_expansion(&[mi("2,1")]).unwrap();
        assert_eq!(one, PowerSumPolynomial::from_terms(2, 1, [(mono(&["2,1"]), np(&[1]))]));
        let three = distinct_index_expansion(&[mi("1,0,0"), mi("0,1,0"), mi("0,0,1")]).unwrap();
        let want = PowerSumPolynomial::from_terms(
            3,
            3,
            [
                (mono(&["1,0,0", "0,1,0", "0,0,1"]), np(&[1])),
                (mono(&["1,1,0", "0,0,1"]), np(&[-1])),
                (mono(&["1,0,1", "0,1,0"]), np(&[-1])),
                (mono(&["0,1,1", "1,0,0"]), np(&[-1])),
                (mono(&["1,1,1"]), np(&[2])),
            ],
        );
        assert_eq!(three, want);
    }

    #[test]
    fn distinct_index_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cases = [
            vec![mi("1,0"), mi("0,1")],
            vec![mi("1,0,0"), mi("0,1,0"), mi("0,0,1")],
            vec![mi("2,0"), mi("1,1"), mi("0,1")],
            vec![mi("1,1"), mi("1,1")],
            vec![mi("3,0")],
        ];
        for factors in &cases {
            let data = random_sample(&mut rng, 6, factors[0].arity());
            let got = distinct_index_expansion(factors).unwrap().evaluate(&data).unwrap();
            let want = brute_distinct(&data, factors);
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn polykay_examples() {
        let k = polykay(&lam("1,1,0|0,0,1")).unwrap();
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
        assert_eq!(k, want);
        let k = polykay(&lam("1,1")).unwrap();
        let want = PowerSumPolynomial::from_terms(
            2,
            2,
            [(mono(&["1,1"]), np(&[0, 1])), (mono(&["1,0", "0,1"]), np(&[-1]))],
        );
        assert_eq!(k, want);
        let k = polykay(&lam("1")).unwrap();
        assert_eq!(k, PowerSumPolynomial::from_terms(1, 1, [(mono(&["1"]), np(&[1]))]));
        assert_eq!(k.to_string(), "S[1] / N");
    }

    #[test]
    fn estimator_examples() {
        let want = |a: &str, b: &str, ab: &str| {
            PowerSumPolynomial::from_terms(
                mi(ab).arity(),
                2,
                [(mono(&[ab]), np(&[0, 1])), (mono(&[a, b]), np(&[-1]))],
            )
        };
        let e = estimator_generalized_cumulant(&"100|011".parse().unwrap()).unwrap();
        assert_eq!(e, want("1,0,0", "0,1,1", "1,1,1"));
        let e = estimator_generalized_cumulant(&"10|01".parse().unwrap()).unwrap();
        assert_eq!(e, want("1,0", "0,1", "1,1"));
        let e = estimator_generalized_cumulant(&"111".parse().unwrap()).unwrap();
        assert_eq!(e, PowerSumPolynomial::from_terms(3, 1, [(mono(&["1,1,1"]), np(&[1]))]));
        let e = estimator_gmc(&lam("1,0|0,2")).unwrap();
        assert_eq!(e, want("1,0", "0,2", "1,2"));
        assert_eq!(e.to_string(), "(N S[1,2] - S[1,0] S[0,2]) / (N (N - 1))");
        let e = estimator_gmc(&lam("2,1,3")).unwrap();
        assert_eq!(e, PowerSumPolynomial::from_terms(3, 1, [(mono(&["2,1,3"]), np(&[1]))]));
    }

    #[test]
    fn estimator_labels_collapse() {
        let e = estimator_gmc(&lam("1,1,1|0,1,1")).unwrap();
        let y = estimator_generalized_cumulant(&canonical_phi(&lam("1,1,1|0,1,1")).unwrap()).unwrap();
        assert_eq!(y.to_string(), "(N S[1,1,1,1,1] - S[1,1,0,1,0] S[0,0,1,0,1]) / (N (N - 1))");
        let labels: Vec<String> = e
            .terms()
            .flat_map(|(m, _)| m.expanded())
            .map(|x| x.to_string())
            .collect();
        assert_eq!(labels, ["1,2,2", "1,1,1", "0,1,1"]);
    }

    #[test]
    fn evaluation() {
        let d = sample(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let k11 = polykay(&lam("1,1")).unwrap();
        assert!((k11.evaluate(&d).unwrap() - 2.0).abs() < 1e-12);
        let mean = polykay(&lam("1,0")).unwrap();
        assert!((mean.evaluate(&d).unwrap() - 2.0).abs() < 1e-12);
        let k3 = polykay(&lam("1,1,0|0,0,1")).unwrap();
        let d3 = sample(&[&[1.0, 2.0, 3.0], &[3.0, 4.0, 5.0]]);
        assert!(matches!(
            k3.evaluate(&d3),
            Err(Error::InsufficientSample { required: 3, actual: 2 })
        ));
        assert!(matches!(k11.evaluate(&d3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn csv_ingest() {
        let d = read_csv("1,2\n3,4\n".as_bytes(), false).unwrap();
        assert_eq!((d.rows(), d.n()), (2, 2));
        assert_eq!(d.get(1, 0), 3.0);
        let d = read_csv("x1,x2\n1,2\n3,4\n".as_bytes(), true).unwrap();
        assert_eq!(d.names().unwrap(), ["x1", "x2"]);
        match read_csv("1,2\n3".as_bytes(), false) {
            Err(Error::Csv { row, column, .. }) => assert_eq!((row, column), (2, 2)),
            other => panic!("{other:?}"),
        }
        match read_csv("1,2\n3,x\n".as_bytes(), false) {
            Err(Error::Csv { row, column, .. }) => assert_eq!((row, column), (2, 2)),
            other => panic!("{other:?}"),
        }
        assert!(read_csv("a,b\n".as_bytes(), true).is_err());
        assert!(read_csv("1,nan\n".as_bytes(), false).is_err());
    }

    #[test]
    fn csv_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut f, b"x,y\n1.5,2\n-3e0,4\n").unwrap();
        let d = ingest_csv(f.path(), true).unwrap();
        assert_eq!(d.row(1), &[-3.0, 4.0]);
    }
}
