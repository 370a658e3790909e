//! Truncated multivariate power series and matrices of them.
//!
//! A jet remembers its truncation order `N`: all coefficients of total degree
//! `≤ N` are exact, everything above is discarded. Binary operations insist on
//! equal `N` and equal variable counts.
//!
//! Monomials are ordered graded-lexicographically: by total degree first, then
//! by exponents left to right with the larger exponent first, so the degree-2
//! monomials in two variables come out as `x1^2, x1*x2, x2^2`. Every basis
//! enumeration and every printed expression uses this order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dense::ConstMatrix;
use crate::error::{Error, Result};
use crate::ratarith as q;
use crate::scalars::{factorial, Scalar};

/// Exponent vector `I = (I_1, …, I_p)` of the monomial `x^I`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars])
    }

    /// The index of the variable `x_k` (zero-based `k`).
    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `I! = I_1!·…·I_p!`
    pub fn factorial(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, &e| acc * factorial(e))
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other` when every exponent stays nonnegative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(MultiIndex)
    }

    /// Coefficient `K!/(K−I)!` in `∂^I x^K = K!/(K−I)! · x^{K−I}`.
    pub fn falling_factorial(&self, by: &MultiIndex) -> BigInt {
        self.0.iter().zip(&by.0).fold(BigInt::one(), |acc, (&k, &i)| {
            (k - i + 1..=k).fold(acc, |a, t| a * BigInt::from(t))
        })
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| {
                for (a, b) in self.0.iter().zip(&other.0) {
                    match b.cmp(a) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
            .then_with(|| self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All monomials of exactly degree `d` in `nvars` variables, in graded-lex order.
pub fn monomials(nvars: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(prefix: &mut Vec<u32>, left: usize, d: u32, out: &mut Vec<MultiIndex>) {
        if left == 1 {
            prefix.push(d);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(prefix, left - 1, d - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return out;
    }
    rec(&mut Vec::with_capacity(nvars), nvars, d, &mut out);
    out
}

/// Monomials with degree in `lo..=hi`, ordered.
pub fn monomials_between(nvars: usize, lo: u32, hi: u32) -> Vec<MultiIndex> {
    (lo..=hi).flat_map(|d| monomials(nvars, d)).collect()
}

/// Number of monomials of degree `d` in `nvars` variables, `C(d+p−1, p−1)`.
pub fn monomial_count(nvars: usize, d: u32) -> usize {
    if nvars == 0 {
        return usize::from(d == 0);
    }
    let (n, k) = (d as usize + nvars - 1, nvars - 1);
    (0..k).fold(1usize, |acc, t| acc * (n - t) / (t + 1))
}

fn check_same(nvars: (usize, usize), trunc: (u32, u32)) -> Result<()> {
    if nvars.0 != nvars.1 {
        return Err(Error::VariableMismatch { left: nvars.0, right: nvars.1 });
    }
    if trunc.0 != trunc.1 {
        return Err(Error::TruncationMismatch { left: trunc.0, right: trunc.1 });
    }
    Ok(())
}

/// A power series in `nvars` variables, exact through degree `truncation`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SeriesJet {
    nvars: usize,
    truncation: u32,
    terms: BTreeMap<MultiIndex, Scalar>,
}

impl SeriesJet {
    pub fn zero(nvars: usize, truncation: u32) -> Self {
        SeriesJet { nvars, truncation, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, truncation: u32, c: Scalar) -> Self {
        Self::monomial(nvars, truncation, MultiIndex::zero(nvars), c)
    }

    /// `c·x^I`, or zero if `|I|` exceeds the truncation.
    pub fn monomial(nvars: usize, truncation: u32, index: MultiIndex, c: Scalar) -> Self {
        let mut s = Self::zero(nvars, truncation);
        s.add_term(index, c);
        s
    }

    pub fn variable(nvars: usize, truncation: u32, k: usize) -> Self {
        Self::monomial(nvars, truncation, MultiIndex::var(nvars, k), Scalar::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, index: &MultiIndex) -> Scalar {
        self.terms.get(index).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·x^I` in place; terms above the truncation are discarded.
    /// Returns `false` if the term was dropped for exceeding the truncation.
    pub fn add_term(&mut self, index: MultiIndex, c: Scalar) -> bool {
        debug_assert_eq!(index.nvars(), self.nvars);
        if index.degree() > self.truncation {
            return c.is_zero();
        }
        if c.is_zero() {
            return true;
        }
        match self.terms.entry(index) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
        true
    }

    /// Lowest degree with a nonzero coefficient; `None` for the zero jet.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().next().map(MultiIndex::degree)
    }

    /// Highest stored degree; `None` for the zero jet.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(MultiIndex::degree)
    }

    pub fn add(&self, other: &SeriesJet) -> Result<SeriesJet> {
        check_same((self.nvars, other.nvars), (self.truncation, other.truncation))?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SeriesJet) -> Result<SeriesJet> {
        check_same((self.nvars, other.nvars), (self.truncation, other.truncation))?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), -v);
        }
        Ok(out)
    }

    pub fn neg(&self) -> SeriesJet {
        SeriesJet {
            nvars: self.nvars,
            truncation: self.truncation,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> SeriesJet {
        if s.is_zero() {
            return Self::zero(self.nvars, self.truncation);
        }
        SeriesJet {
            nvars: self.nvars,
            truncation: self.truncation,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
        }
    }

    pub fn conj(&self) -> SeriesJet {
        SeriesJet {
            nvars: self.nvars,
            truncation: self.truncation,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.conj())).collect(),
        }
    }

    pub fn mul(&self, other: &SeriesJet) -> Result<SeriesJet> {
        check_same((self.nvars, other.nvars), (self.truncation, other.truncation))?;
        let mut out = Self::zero(self.nvars, self.truncation);
        self.mul_acc(other, &mut out);
        Ok(out)
    }

    /// `acc += self·other`, truncated at `acc`'s order. Shapes are trusted.
    pub(crate) fn mul_acc(&self, other: &SeriesJet, acc: &mut SeriesJet) {
        let n = acc.truncation;
        for (ka, va) in &self.terms {
            let da = ka.degree();
            if da > n {
                break;
            }
            for (kb, vb) in &other.terms {
                if da + kb.degree() > n {
                    break;
                }
                acc.add_term(ka.add(kb), va * vb);
            }
        }
    }

    /// `π_j`: drop terms of degree above `j`.
    pub fn project(&self, j: u32) -> SeriesJet {
        SeriesJet {
            nvars: self.nvars,
            truncation: self.truncation,
            terms: self.terms.iter().filter(|(k, _)| k.degree() <= j).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    /// Degree-`j` homogeneous part.
    pub fn homogeneous(&self, j: u32) -> SeriesJet {
        SeriesJet {
            nvars: self.nvars,
            truncation: self.truncation,
            terms: self.terms.iter().filter(|(k, _)| k.degree() == j).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    /// Reinterpret with a lower truncation order.
    pub fn truncate(&self, truncation: u32) -> SeriesJet {
        let mut s = self.project(truncation.min(self.truncation));
        s.truncation = truncation.min(self.truncation);
        s
    }

    /// `∂^{|I|}/∂x^I` applied to the stored terms.
    pub fn derivative(&self, by: &MultiIndex) -> SeriesJet {
        let mut out = Self::zero(self.nvars, self.truncation);
        for (k, v) in &self.terms {
            if let Some(rest) = k.checked_sub(by) {
                let f = Scalar::from_bigint(k.falling_factorial(by));
                out.add_term(rest, v * &f);
            }
        }
        out
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<SeriesJet> {
        let c0 = self.coefficient(&MultiIndex::zero(self.nvars));
        let inv0 = c0.inv().ok_or(Error::SingularConstantTerm)?;
        // w = inv0 · Σ (1 − inv0·s)^k
        let one = Self::constant(self.nvars, self.truncation, Scalar::one());
        let u = one.sub(&self.scale(&inv0))?;
        let mut out = one.clone();
        let mut power = one;
        for _ in 0..self.truncation {
            power = power.mul(&u)?;
            if power.is_zero() {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out.scale(&inv0))
    }

    /// Divides by `x^I` when every stored term is divisible by it. The
    /// truncation drops by `|I|`, since the quotient is only known that far.
    pub fn div_monomial(&self, by: &MultiIndex) -> Option<SeriesJet> {
        let d = by.degree();
        let mut out = Self::zero(self.nvars, self.truncation - d.min(self.truncation));
        for (k, v) in &self.terms {
            out.add_term(k.checked_sub(by)?, v.clone());
        }
        Some(out)
    }

    /// Same series with a different recorded truncation; the caller vouches
    /// that the coefficients are exact that far.
    pub(crate) fn with_truncation(mut self, truncation: u32) -> SeriesJet {
        self.terms.retain(|k, _| k.degree() <= truncation);
        self.truncation = truncation;
        self
    }

    /// Text form using `names` for the variables, e.g. `1/2*x^2*y - 3*y^3`.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let mono = monomial_text(k, names);
            let (neg, body) = coefficient_text(c);
            let piece = match (mono.is_empty(), body.as_str()) {
                (true, _) => body,
                (false, "1") => mono,
                (false, _) => format!("{body}*{mono}"),
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&piece);
        }
        out
    }
}

fn monomial_text(k: &MultiIndex, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (v, &e) in k.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[v].clone()),
            _ => parts.push(format!("{}^{}", names[v], e)),
        }
    }
    parts.join("*")
}

/// Splits a coefficient into a sign and an unsigned body.
fn coefficient_text(c: &Scalar) -> (bool, String) {
    if c.is_real() {
        let neg = c.re() < &BigRational::zero();
        let abs = if neg { -c } else { c.clone() };
        return (neg, abs.to_string());
    }
    if c.re().is_zero() {
        let neg = c.im() < &BigRational::zero();
        let abs = if neg { -c } else { c.clone() };
        return (neg, format!("({abs})"));
    }
    (false, format!("({c})"))
}

pub fn default_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|k| format!("x{k}")).collect()
}

impl fmt::Debug for SeriesJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({})", self.to_text(&default_names(self.nvars)), self.truncation + 1)
    }
}

impl fmt::Display for SeriesJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&default_names(self.nvars)))
    }
}

/// One stored coefficient in the JSON form of a series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub re: String,
    pub im: String,
}

impl SeriesJet {
    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(k, c)| TermJson {
                exps: k.exponents().to_vec(),
                re: crate::scalars::rational_to_string(c.re()),
                im: crate::scalars::rational_to_string(c.im()),
            })
            .collect()
    }

    pub fn from_json_terms(nvars: usize, truncation: u32, terms: &[TermJson]) -> Result<SeriesJet> {
        let mut s = Self::zero(nvars, truncation);
        for t in terms {
            if t.exps.len() != nvars {
                return Err(Error::InvalidInput(format!("term has {} exponents, expected {nvars}", t.exps.len())));
            }
            let c = Scalar::new(crate::scalars::rational_from_str(&t.re)?, crate::scalars::rational_from_str(&t.im)?);
            s.add_term(MultiIndex::new(t.exps.clone()), c);
        }
        Ok(s)
    }
}

/// Series scaled by a common denominator to Gaussian-integer coefficients.
struct Cleared {
    den: BigInt,
    entries: Vec<Vec<(MultiIndex, BigInt, BigInt)>>,
}

impl Cleared {
    fn new<'a>(series: impl Iterator<Item = &'a SeriesJet> + Clone) -> Self {
        let mut den = BigInt::one();
        for s in series.clone() {
            for c in s.terms.values() {
                den = q::lcm(&den, c.re().denom());
                if !c.im().is_zero() {
                    den = q::lcm(&den, c.im().denom());
                }
            }
        }
        let scale = |r: &BigRational| if r.is_zero() { BigInt::zero() } else { r.numer() * (&den / r.denom()) };
        let entries = series
            .map(|s| s.terms.iter().map(|(k, c)| (k.clone(), scale(c.re()), scale(c.im()))).collect())
            .collect();
        Cleared { den, entries }
    }
}

type IntSeries = BTreeMap<MultiIndex, (BigInt, BigInt)>;

/// A matrix jet as Gaussian-integer numerators over one denominator, kept as
/// a product of factors. Sums and products then need no gcds until the
/// result is turned back into a [`MatrixJet`].
#[derive(Clone)]
pub(crate) struct IntMatrixJet {
    rows: usize,
    cols: usize,
    nvars: usize,
    truncation: u32,
    den: Vec<BigInt>,
    entries: Vec<IntSeries>,
}

impl IntMatrixJet {
    pub(crate) fn from_jet(a: &MatrixJet) -> Self {
        let c = Cleared::new(a.entries.iter());
        IntMatrixJet {
            rows: a.rows,
            cols: a.cols,
            nvars: a.nvars,
            truncation: a.truncation,
            den: vec![c.den],
            entries: c.entries.into_iter().map(|e| e.into_iter().map(|(k, re, im)| (k, (re, im))).collect()).collect(),
        }
    }

    /// The identity with denominator 1.
    pub(crate) fn identity(n: usize, nvars: usize, truncation: u32) -> Self {
        let mut entries = vec![IntSeries::new(); n * n];
        for i in 0..n {
            entries[i * n + i].insert(MultiIndex::zero(nvars), (BigInt::one(), BigInt::zero()));
        }
        IntMatrixJet { rows: n, cols: n, nvars, truncation, den: Vec::new(), entries }
    }

    pub(crate) fn zeros_like(&self) -> Self {
        IntMatrixJet { den: Vec::new(), entries: vec![IntSeries::new(); self.entries.len()], ..*self }
    }

    pub(crate) fn denominator(&self) -> &[BigInt] {
        &self.den
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.values().all(|(re, im)| re.is_zero() && im.is_zero()))
    }

    /// Product of numerators; the denominator factors are concatenated.
    pub(crate) fn mul(&self, other: &IntMatrixJet) -> IntMatrixJet {
        debug_assert_eq!(self.cols, other.rows);
        let n = self.truncation;
        let mut entries = vec![IntSeries::new(); self.rows * other.cols];
        for i in 0..self.rows {
            for j in 0..other.cols {
                let acc = &mut entries[i * other.cols + j];
                for k in 0..self.cols {
                    let (a, b) = (&self.entries[i * self.cols + k], &other.entries[k * other.cols + j]);
                    for (ka, (ar, ai)) in a {
                        let da = ka.degree();
                        if da > n {
                            break;
                        }
                        for (kb, (br, bi)) in b {
                            if da + kb.degree() > n {
                                break;
                            }
                            let slot = acc.entry(ka.add(kb)).or_default();
                            slot.0 += ar * br;
                            if !ai.is_zero() || !bi.is_zero() {
                                slot.0 -= ai * bi;
                                slot.1 += ar * bi + ai * br;
                            }
                        }
                    }
                }
            }
        }
        let den = self.den.iter().chain(&other.den).cloned().collect();
        IntMatrixJet { rows: self.rows, cols: other.cols, entries, den, ..*self }
    }

    /// `self += c · other` on numerators, ignoring `other`'s denominator.
    pub(crate) fn add_scaled_numerators(&mut self, c: &BigInt, other: &IntMatrixJet) {
        for (acc, e) in self.entries.iter_mut().zip(&other.entries) {
            for (k, (re, im)) in e {
                let slot = acc.entry(k.clone()).or_default();
                slot.0 += c * re;
                if !im.is_zero() {
                    slot.1 += c * im;
                }
            }
        }
    }

    pub(crate) fn with_denominator(mut self, den: Vec<BigInt>) -> Self {
        self.den = den;
        self
    }

    pub(crate) fn to_jet(&self) -> MatrixJet {
        let mut out = MatrixJet::zeros(self.rows, self.cols, self.nvars, self.truncation);
        for (e, src) in out.entries.iter_mut().zip(&self.entries) {
            for (k, (re, im)) in src {
                let v = Scalar::new(q::reduce_by_factors(re.clone(), &self.den), q::reduce_by_factors(im.clone(), &self.den));
                if !v.is_zero() {
                    e.terms.insert(k.clone(), v);
                }
            }
        }
        out
    }
}

/// An `rows × cols` matrix of series sharing `nvars` and `truncation`;
/// equivalently `Σ_I A_I x^I` with constant matrices `A_I`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixJet {
    rows: usize,
    cols: usize,
    nvars: usize,
    truncation: u32,
    entries: Vec<SeriesJet>,
}

impl MatrixJet {
    pub fn zeros(rows: usize, cols: usize, nvars: usize, truncation: u32) -> Self {
        MatrixJet { rows, cols, nvars, truncation, entries: vec![SeriesJet::zero(nvars, truncation); rows * cols] }
    }

    pub fn identity(n: usize, nvars: usize, truncation: u32) -> Self {
        Self::constant(&ConstMatrix::identity(n), nvars, truncation)
    }

    pub fn constant(m: &ConstMatrix, nvars: usize, truncation: u32) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols(), nvars, truncation);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.entries[i * m.cols() + j] = SeriesJet::constant(nvars, truncation, m.get(i, j).clone());
            }
        }
        out
    }

    /// `c·E_{ab}·x^I`.
    pub fn unit_monomial(
        rows: usize,
        cols: usize,
        truncation: u32,
        index: MultiIndex,
        (a, b): (usize, usize),
        c: Scalar,
    ) -> Self {
        let nvars = index.nvars();
        let mut out = Self::zeros(rows, cols, nvars, truncation);
        out.entries[a * cols + b] = SeriesJet::monomial(nvars, truncation, index, c);
        out
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<SeriesJet>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        let first = entries.first().ok_or_else(|| Error::ShapeMismatch("empty matrix".into()))?;
        let (nvars, truncation) = (first.nvars, first.truncation);
        for e in &entries {
            check_same((nvars, e.nvars), (truncation, e.truncation))?;
        }
        Ok(MatrixJet { rows, cols, nvars, truncation, entries })
    }

    pub fn from_coefficients(
        rows: usize,
        cols: usize,
        nvars: usize,
        truncation: u32,
        coefficients: &BTreeMap<MultiIndex, ConstMatrix>,
    ) -> Result<Self> {
        let mut out = Self::zeros(rows, cols, nvars, truncation);
        for (k, m) in coefficients {
            if (m.rows(), m.cols()) != (rows, cols) {
                return Err(Error::ShapeMismatch("coefficient matrix has the wrong shape".into()));
            }
            for i in 0..rows {
                for j in 0..cols {
                    out.entries[i * cols + j].add_term(k.clone(), m.get(i, j).clone());
                }
            }
        }
        Ok(out)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &SeriesJet {
        &self.entries[i * self.cols + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, s: SeriesJet) -> Result<()> {
        check_same((self.nvars, s.nvars), (self.truncation, s.truncation))?;
        self.entries[i * self.cols + j] = s;
        Ok(())
    }

    pub(crate) fn entry_mut(&mut self, i: usize, j: usize) -> &mut SeriesJet {
        &mut self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[SeriesJet] {
        &self.entries
    }

    /// The constant matrix `A_I`.
    pub fn coefficient(&self, index: &MultiIndex) -> ConstMatrix {
        ConstMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j).coefficient(index))
    }

    /// Coefficient view: every `I` with `A_I ≠ 0`.
    pub fn coefficients(&self) -> BTreeMap<MultiIndex, ConstMatrix> {
        let mut out: BTreeMap<MultiIndex, ConstMatrix> = BTreeMap::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                for (k, v) in self.entry(i, j).terms() {
                    out.entry(k.clone()).or_insert_with(|| ConstMatrix::zeros(self.rows, self.cols)).set(i, j, v.clone());
                }
            }
        }
        out
    }

    pub fn constant_term(&self) -> ConstMatrix {
        self.coefficient(&MultiIndex::zero(self.nvars))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(SeriesJet::is_zero)
    }

    /// `order(A)`: least degree with `A_I ≠ 0`; `None` for the zero matrix.
    pub fn valuation(&self) -> Option<u32> {
        self.entries.iter().filter_map(SeriesJet::valuation).min()
    }

    /// Highest stored degree; `None` for the zero matrix.
    pub fn degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(SeriesJet::degree).max()
    }

    fn check_space(&self, other: &MatrixJet) -> Result<()> {
        check_same((self.nvars, other.nvars), (self.truncation, other.truncation))
    }

    fn check_shape(&self, other: &MatrixJet) -> Result<()> {
        self.check_space(other)?;
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(&SeriesJet) -> SeriesJet) -> MatrixJet {
        MatrixJet {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            truncation: self.truncation,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &MatrixJet) -> Result<MatrixJet> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            for (k, v) in &b.terms {
                a.add_term(k.clone(), v.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MatrixJet) -> Result<MatrixJet> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            for (k, v) in &b.terms {
                a.add_term(k.clone(), -v);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> MatrixJet {
        self.map(SeriesJet::neg)
    }

    pub fn scale(&self, s: &Scalar) -> MatrixJet {
        self.map(|e| e.scale(s))
    }

    /// Multiply by a scalar series entrywise.
    pub fn scale_series(&self, s: &SeriesJet) -> Result<MatrixJet> {
        check_same((self.nvars, s.nvars), (self.truncation, s.truncation))?;
        let mut out = Self::zeros(self.rows, self.cols, self.nvars, self.truncation);
        for (o, e) in out.entries.iter_mut().zip(&self.entries) {
            e.mul_acc(s, o);
        }
        Ok(out)
    }

    /// Entrywise complex conjugation.
    pub fn conj(&self) -> MatrixJet {
        self.map(SeriesJet::conj)
    }

    pub fn transpose(&self) -> MatrixJet {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.entry(i, j).clone());
            }
        }
        MatrixJet { rows: self.cols, cols: self.rows, nvars: self.nvars, truncation: self.truncation, entries }
    }

    /// Truncated matrix product.
    pub fn mul(&self, other: &MatrixJet) -> Result<MatrixJet> {
        self.check_space(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        // Rows of self and columns of other are scaled to integers first, so
        // each output coefficient costs one gcd instead of one per product.
        let n = self.truncation;
        let rows: Vec<Cleared> = (0..self.rows).map(|i| Cleared::new((0..self.cols).map(|k| self.entry(i, k)))).collect();
        let cols: Vec<Cleared> =
            (0..other.cols).map(|j| Cleared::new((0..other.rows).map(|k| other.entry(k, j)))).collect();
        let mut out = Self::zeros(self.rows, other.cols, self.nvars, n);
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                let mut acc: BTreeMap<MultiIndex, (BigInt, BigInt)> = BTreeMap::new();
                for (a, b) in r.entries.iter().zip(&c.entries) {
                    for (ka, ar, ai) in a {
                        let da = ka.degree();
                        if da > n {
                            break;
                        }
                        for (kb, br, bi) in b {
                            if da + kb.degree() > n {
                                break;
                            }
                            let slot = acc.entry(ka.add(kb)).or_default();
                            slot.0 += ar * br;
                            if !ai.is_zero() || !bi.is_zero() {
                                slot.0 -= ai * bi;
                                slot.1 += ar * bi + ai * br;
                            }
                        }
                    }
                }
                let den = [r.den.clone(), c.den.clone()];
                let e = &mut out.entries[i * other.cols + j];
                for (k, (re, im)) in acc {
                    let v = Scalar::new(q::reduce_by_factors(re, &den), q::reduce_by_factors(im, &den));
                    if !v.is_zero() {
                        e.terms.insert(k, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `π_j A = Σ_{|I|≤j} A_I x^I`.
    pub fn project(&self, j: u32) -> Result<MatrixJet> {
        self.check_degree(j)?;
        Ok(self.map(|e| e.project(j)))
    }

    /// `A^{(j)} = Σ_{|I|=j} A_I x^I`.
    pub fn homogeneous(&self, j: u32) -> Result<MatrixJet> {
        self.check_degree(j)?;
        Ok(self.map(|e| e.homogeneous(j)))
    }

    /// `π_j` without the range check; `j` may be negative-like (`None` → zero).
    pub(crate) fn project_below(&self, j: u32) -> MatrixJet {
        match j.checked_sub(1) {
            Some(jm1) => self.map(|e| e.project(jm1)),
            None => Self::zeros(self.rows, self.cols, self.nvars, self.truncation),
        }
    }

    fn check_degree(&self, j: u32) -> Result<()> {
        if j > self.truncation {
            return Err(Error::DegreeOutOfRange { degree: j, truncation: self.truncation });
        }
        Ok(())
    }

    /// Lower the truncation order to `truncation ≤ N`.
    pub fn truncate(&self, truncation: u32) -> MatrixJet {
        let t = truncation.min(self.truncation);
        MatrixJet {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            truncation: t,
            entries: self.entries.iter().map(|e| e.truncate(t)).collect(),
        }
    }

    /// `⟨A, B⟩ = Σ_I trace(B_I* A_I)·I!`, conjugate-linear in `B`.
    pub fn inner_product(&self, other: &MatrixJet) -> Result<Scalar> {
        self.check_shape(other)?;
        let mut acc = Scalar::zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            for (k, va) in &a.terms {
                if let Some(vb) = b.terms.get(k) {
                    let w = Scalar::from_bigint(k.factorial());
                    acc += &(&(va * &vb.conj()) * &w);
                }
            }
        }
        Ok(acc)
    }

    /// `⟨A, A⟩` as a rational.
    pub fn norm_squared(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for e in &self.entries {
            for (k, v) in &e.terms {
                acc += v.norm() * BigRational::from_integer(k.factorial());
            }
        }
        acc
    }

    /// `B*(∂/∂x) P = Σ_I B_I* ∂^{|I|}P/∂x^I` with `B = self` (`m×n`) and `P`
    /// (`m×n'`), giving an `n×n'` jet. `P` is read as the polynomial formed by
    /// its stored terms; the result keeps `P`'s truncation.
    pub fn apply_diff_op(&self, p: &MatrixJet) -> Result<MatrixJet> {
        if self.nvars != p.nvars {
            return Err(Error::VariableMismatch { left: self.nvars, right: p.nvars });
        }
        if self.rows != p.rows {
            return Err(Error::ShapeMismatch(format!(
                "operator from a {}x{} matrix cannot act on a {}x{} matrix",
                self.rows, self.cols, p.rows, p.cols
            )));
        }
        let mut out = Self::zeros(self.cols, p.cols, p.nvars, p.truncation);
        let max_deg = p.degree().unwrap_or(0);
        for k in 0..self.rows {
            for r in 0..self.cols {
                for (index, b) in &self.entry(k, r).terms {
                    if index.degree() > max_deg {
                        break;
                    }
                    let bc = b.conj();
                    for c in 0..p.cols {
                        let d = p.entry(k, c).derivative(index);
                        for (t, v) in d.terms {
                            out.entries[r * p.cols + c].add_term(t, &bc * &v);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `D_B P = (ν_l, ν_r)` with `ν_l = ((B*)ᵀ(∂) Pᵀ)ᵀ` and `ν_r = −B*(∂) P`.
    pub fn d_operator(&self, p: &MatrixJet) -> Result<JetPair> {
        if self.shape() != p.shape() {
            return Err(Error::ShapeMismatch("D_B needs P with the shape of B".into()));
        }
        let left = self.transpose().apply_diff_op(&p.transpose())?.transpose();
        let right = self.apply_diff_op(p)?.neg();
        Ok(JetPair { left, right })
    }

    pub fn to_text(&self, names: &[String]) -> String {
        let mut out = String::from("[");
        for i in 0..self.rows {
            if i > 0 {
                out.push_str("; ");
            }
            for j in 0..self.cols {
                if j > 0 {
                    out.push_str(", ");
                }
                out.push_str(&self.entry(i, j).to_text(names));
            }
        }
        out.push(']');
        out
    }
}

impl fmt::Debug for MatrixJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({})", self.to_text(&default_names(self.nvars)), self.truncation + 1)
    }
}

impl fmt::Display for MatrixJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&default_names(self.nvars)))
    }
}

/// JSON form of a matrix jet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJetJson {
    pub rows: usize,
    pub cols: usize,
    pub nvars: usize,
    pub truncation: u32,
    pub entries: Vec<Vec<Vec<TermJson>>>,
}

impl MatrixJet {
    pub fn to_json(&self) -> MatrixJetJson {
        MatrixJetJson {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            truncation: self.truncation,
            entries: (0..self.rows).map(|i| (0..self.cols).map(|j| self.entry(i, j).to_json_terms()).collect()).collect(),
        }
    }

    pub fn from_json(j: &MatrixJetJson) -> Result<MatrixJet> {
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(Error::ShapeMismatch("entries do not match the declared shape".into()));
        }
        let mut out = Self::zeros(j.rows, j.cols, j.nvars, j.truncation);
        for (i, row) in j.entries.iter().enumerate() {
            for (c, terms) in row.iter().enumerate() {
                out.entries[i * j.cols + c] = SeriesJet::from_json_terms(j.nvars, j.truncation, terms)?;
            }
        }
        Ok(out)
    }
}

/// A pair `(ν_l, ν_r)` of square jets acting from the left and the right.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct JetPair {
    pub left: MatrixJet,
    pub right: MatrixJet,
}

impl JetPair {
    pub fn zeros(m: usize, n: usize, nvars: usize, truncation: u32) -> Self {
        JetPair { left: MatrixJet::zeros(m, m, nvars, truncation), right: MatrixJet::zeros(n, n, nvars, truncation) }
    }

    /// `⟨ν, μ⟩ = ⟨ν_l, μ_l⟩ + ⟨ν_r, μ_r⟩`.
    pub fn inner_product(&self, other: &JetPair) -> Result<Scalar> {
        Ok(&self.left.inner_product(&other.left)? + &self.right.inner_product(&other.right)?)
    }

    pub fn add(&self, other: &JetPair) -> Result<JetPair> {
        Ok(JetPair { left: self.left.add(&other.left)?, right: self.right.add(&other.right)? })
    }

    pub fn sub(&self, other: &JetPair) -> Result<JetPair> {
        Ok(JetPair { left: self.left.sub(&other.left)?, right: self.right.sub(&other.right)? })
    }

    pub fn scale(&self, s: &Scalar) -> JetPair {
        JetPair { left: self.left.scale(s), right: self.right.scale(s) }
    }

    pub fn neg(&self) -> JetPair {
        JetPair { left: self.left.neg(), right: self.right.neg() }
    }

    pub fn project(&self, j: u32) -> Result<JetPair> {
        Ok(JetPair { left: self.left.project(j)?, right: self.right.project(j)? })
    }

    pub fn is_zero(&self) -> bool {
        self.left.is_zero() && self.right.is_zero()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(p: usize, n: u32, k: usize) -> SeriesJet {
        SeriesJet::variable(p, n, k)
    }

    fn s1(series: SeriesJet) -> MatrixJet {
        MatrixJet::from_entries(1, 1, vec![series]).unwrap()
    }

    fn mono(p: usize, n: u32, e: &[u32], c: i64) -> SeriesJet {
        SeriesJet::monomial(p, n, MultiIndex::new(e.to_vec()), Scalar::from_int(c))
    }

    #[test]
    fn multi_index_order_and_counts() {
        let m2 = monomials(2, 2);
        assert_eq!(m2, vec![MultiIndex::new(vec![2, 0]), MultiIndex::new(vec![1, 1]), MultiIndex::new(vec![0, 2])]);
        assert!(MultiIndex::new(vec![0, 3]) > MultiIndex::new(vec![2, 0]));
        assert!(MultiIndex::new(vec![1, 0]) < MultiIndex::new(vec![0, 1]));
        for p in 1..4 {
            for d in 0..6 {
                assert_eq!(monomials(p, d).len(), monomial_count(p, d));
                let ms = monomials(p, d);
                assert!(ms.windows(2).all(|w| w[0] < w[1]));
            }
        }
        let i = MultiIndex::new(vec![2, 3]);
        assert_eq!(i.degree(), 5);
        assert_eq!(i.factorial(), BigInt::from(12));
        assert_eq!(MultiIndex::zero(3).factorial(), BigInt::one());
    }

    #[test]
    fn mul_examples() {
        let a = s1(x(2, 2, 0));
        let b = s1(x(2, 2, 1));
        assert_eq!(a.mul(&b).unwrap(), s1(mono(2, 2, &[1, 1], 1)));
        let id = MatrixJet::identity(2, 1, 3);
        let mut u = MatrixJet::identity(2, 1, 3);
        u.set_entry(0, 1, x(1, 3, 0)).unwrap();
        let mut w = MatrixJet::identity(2, 1, 3);
        w.set_entry(0, 1, x(1, 3, 0).neg()).unwrap();
        assert_eq!(u.mul(&w).unwrap(), id);
        assert_eq!(id.mul(&u).unwrap(), u);
    }

    #[test]
    fn mul_errors() {
        let a = MatrixJet::zeros(2, 3, 1, 2);
        let b = MatrixJet::zeros(2, 3, 1, 2);
        assert!(matches!(a.mul(&b), Err(Error::ShapeMismatch(_))));
        let c = MatrixJet::zeros(3, 3, 1, 3);
        assert!(matches!(a.mul(&c), Err(Error::TruncationMismatch { .. })));
    }

    #[test]
    fn projection_examples() {
        let f = s1(x(1, 3, 0).add(&mono(1, 3, &[2], 1)).unwrap());
        assert_eq!(f.project(1).unwrap(), s1(x(1, 3, 0)));
        assert!(f.project(4).is_err());
        let g = s1(mono(2, 3, &[1, 0], 1).add(&mono(2, 3, &[1, 1], 1)).unwrap().add(&mono(2, 3, &[0, 0], 5)).unwrap());
        assert_eq!(g.homogeneous(2).unwrap(), s1(mono(2, 3, &[1, 1], 1)));
        assert_eq!(g.homogeneous(0).unwrap().constant_term(), g.constant_term());
        assert_eq!(g.project(0).unwrap(), MatrixJet::constant(&g.constant_term(), 2, 3));
    }

    #[test]
    fn inner_product_examples() {
        let a = s1(mono(1, 3, &[2], 1));
        assert_eq!(a.inner_product(&a).unwrap(), Scalar::from_int(2));
        let b = s1(mono(2, 3, &[1, 1], 1));
        assert_eq!(b.inner_product(&b).unwrap(), Scalar::one());
        assert!(b.inner_product(&MatrixJet::zeros(1, 1, 2, 3)).unwrap().is_zero());
    }

    #[test]
    fn diff_op_examples() {
        // B = x², P = x³ → 6x
        let b = s1(mono(1, 3, &[2], 1));
        let p = s1(mono(1, 3, &[3], 1));
        assert_eq!(b.apply_diff_op(&p).unwrap(), s1(mono(1, 3, &[1], 6)));
        // B = x, P = y → 0
        let b = s1(mono(2, 2, &[1, 0], 1));
        let p = s1(mono(2, 2, &[0, 1], 1));
        assert!(b.apply_diff_op(&p).unwrap().is_zero());
        // constant B acts by B*
        let c = ConstMatrix::from_rows(vec![
            vec![Scalar::from_int(1), Scalar::from_int(2)],
            vec![Scalar::i(), Scalar::from_int(0)],
        ])
        .unwrap();
        let bc = MatrixJet::constant(&c, 1, 2);
        let mut p = MatrixJet::zeros(2, 1, 1, 2);
        p.set_entry(0, 0, x(1, 2, 0)).unwrap();
        p.set_entry(1, 0, mono(1, 2, &[2], 3)).unwrap();
        let expect = MatrixJet::constant(&c.adjoint(), 1, 2).mul(&p).unwrap();
        assert_eq!(bc.apply_diff_op(&p).unwrap(), expect);
    }

    #[test]
    fn d_operator_example() {
        let b = s1(x(1, 2, 0));
        let d = b.d_operator(&b).unwrap();
        assert_eq!(d.left, s1(SeriesJet::constant(1, 2, Scalar::one())));
        assert_eq!(d.right, s1(SeriesJet::constant(1, 2, Scalar::from_int(-1))));
        let z = b.d_operator(&MatrixJet::zeros(1, 1, 1, 2)).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn series_inverse_and_division() {
        let one_plus_x = SeriesJet::constant(1, 3, Scalar::one()).add(&x(1, 3, 0)).unwrap();
        let inv = one_plus_x.inverse().unwrap();
        let expect = [1, -1, 1, -1]
            .iter()
            .enumerate()
            .fold(SeriesJet::zero(1, 3), |acc, (d, &c)| acc.add(&mono(1, 3, &[d as u32], c)).unwrap());
        assert_eq!(inv, expect);
        assert_eq!(x(1, 3, 0).inverse(), Err(Error::SingularConstantTerm));
        let q = mono(1, 4, &[3], 2).div_monomial(&MultiIndex::new(vec![2])).unwrap();
        assert_eq!(q, mono(1, 2, &[1], 2));
    }

    #[test]
    fn text_forms() {
        let names = vec!["x1".to_string(), "x2".to_string()];
        let s = SeriesJet::monomial(2, 3, MultiIndex::new(vec![2, 1]), Scalar::ratio(1, 2))
            .add(&mono(2, 3, &[0, 3], -3))
            .unwrap();
        assert_eq!(s.to_text(&names), "1/2*x1^2*x2 - 3*x2^3");
        let t = SeriesJet::monomial(2, 3, MultiIndex::new(vec![1, 0]), &Scalar::one() + &(&Scalar::from_int(2) * &Scalar::i()))
            .add(&mono(2, 3, &[0, 0], -1))
            .unwrap();
        assert_eq!(t.to_text(&names), "-1 + (1+2*i)*x1");
        assert_eq!(SeriesJet::zero(2, 1).to_text(&names), "0");
    }

    pub(crate) fn arb_series(p: usize, n: u32) -> impl Strategy<Value = SeriesJet> {
        proptest::collection::vec((proptest::collection::vec(0u32..=n, p), -5i64..=5, 1i64..=3), 0..6).prop_map(
            move |terms| {
                let mut s = SeriesJet::zero(p, n);
                for (e, a, b) in terms {
                    s.add_term(MultiIndex::new(e), Scalar::ratio(a, b));
                }
                s
            },
        )
    }

    pub(crate) fn arb_matrix(r: usize, c: usize, p: usize, n: u32) -> impl Strategy<Value = MatrixJet> {
        proptest::collection::vec(arb_series(p, n), r * c).prop_map(move |e| MatrixJet::from_entries(r, c, e).unwrap())
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_matrix(2, 2, 2, 3), b in arb_matrix(2, 2, 2, 3), c in arb_matrix(2, 2, 2, 3)) {
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.add(&b).unwrap().sub(&b).unwrap(), a.clone());
            let s = Scalar::ratio(3, 7);
            prop_assert_eq!(a.scale(&s).mul(&b).unwrap(), a.mul(&b).unwrap().scale(&s));
            prop_assert_eq!(a.mul(&b).unwrap().transpose(), b.transpose().mul(&a.transpose()).unwrap());
        }

        #[test]
        fn projector_laws(a in arb_matrix(2, 2, 2, 3), b in arb_matrix(2, 2, 2, 3)) {
            prop_assert_eq!(a.project(3).unwrap().project(2).unwrap(), a.project(2).unwrap());
            let mut sum = MatrixJet::zeros(2, 2, 2, 3);
            for j in 0..=3 {
                sum = sum.add(&a.homogeneous(j).unwrap()).unwrap();
                for i in 0..=3 {
                    let hh = a.homogeneous(i).unwrap().homogeneous(j).unwrap();
                    if i != j { prop_assert!(hh.is_zero()); } else { prop_assert_eq!(hh, a.homogeneous(i).unwrap()); }
                }
                let partial = (0..=j).fold(MatrixJet::zeros(2, 2, 2, 3), |acc, i| acc.add(&a.homogeneous(i).unwrap()).unwrap());
                prop_assert_eq!(partial, a.project(j).unwrap());
                prop_assert_eq!(
                    a.project(j).unwrap().inner_product(&b).unwrap(),
                    a.inner_product(&b.project(j).unwrap()).unwrap()
                );
            }
            prop_assert_eq!(sum, a.clone());
        }

        #[test]
        fn inner_product_is_positive_definite(a in arb_matrix(2, 3, 2, 3), b in arb_matrix(2, 3, 2, 3)) {
            let aa = a.inner_product(&a).unwrap();
            prop_assert!(aa.is_real());
            prop_assert_eq!(aa.is_zero(), a.is_zero());
            prop_assert!(aa.re() >= &BigRational::zero());
            prop_assert_eq!(a.inner_product(&b).unwrap(), b.inner_product(&a).unwrap().conj());
            prop_assert_eq!(Scalar::real(a.norm_squared()), aa);
        }

        #[test]
        fn json_round_trip(a in arb_matrix(2, 2, 2, 3)) {
            let j = serde_json::to_string(&a.to_json()).unwrap();
            let back: MatrixJetJson = serde_json::from_str(&j).unwrap();
            prop_assert_eq!(MatrixJet::from_json(&back).unwrap(), a);
        }
    }
}
