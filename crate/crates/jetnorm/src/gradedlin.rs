//! Exact linear algebra on graded jet spaces.
//!
//! Matrix jets of degrees `lo..=hi` get coordinates from the basis
//! `E_ab·x^I`, ordered by degree, then monomial, then row-major position.
//! Lie pairs get coordinates from a basis that already satisfies the kind's
//! constraint, ordered by degree, monomial, block (`ν_l` before `ν_r`) and
//! position. Both bases are orthogonal for the factorial-weighted inner
//! product, so that product is a diagonal weight in coordinates.
//!
//! The central computation is [`v_space`]: the degree-`j` directions
//! `π_j(νA)` reachable by Lie elements `ν` that leave the `(j−1)`-jet alone.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::{GroupKind, LieElementJet};
use crate::jets::{monomial_count, monomials_between, JetPair, MatrixJet, MultiIndex, SeriesJet};
use crate::linalg::{null_space, project_onto, rref_basis, rref_fast, solve_dense, support_components, Echelon, SparseVec};
use crate::modular;
use crate::scalars::Scalar;

/// Default cap on the number of Lie basis columns in one assembly.
pub const DEFAULT_MAX_COLUMNS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_columns: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_columns: DEFAULT_MAX_COLUMNS }
    }
}

impl Limits {
    fn check(&self, columns: usize) -> Result<()> {
        if columns > self.max_columns {
            return Err(Error::Guardrail { columns, limit: self.max_columns });
        }
        Ok(())
    }
}

fn index_map(monomials: &[MultiIndex]) -> HashMap<MultiIndex, usize> {
    monomials.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect()
}

fn weight_of(index: &MultiIndex) -> Scalar {
    Scalar::from_bigint(index.factorial())
}

fn unit_label(a: usize, b: usize, index: &MultiIndex) -> String {
    let mono = SeriesJet::monomial(index.nvars(), index.degree(), index.clone(), Scalar::one()).to_string();
    format!("E{}{}*{}", a + 1, b + 1, mono)
}

/// Coordinates on `rows × cols` matrix jets of degrees `lo..=hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixBasis {
    rows: usize,
    cols: usize,
    nvars: usize,
    lo: u32,
    hi: u32,
    monomials: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl MatrixBasis {
    pub fn new(rows: usize, cols: usize, nvars: usize, lo: u32, hi: u32) -> Self {
        let monomials = if lo <= hi { monomials_between(nvars, lo, hi) } else { Vec::new() };
        let index = index_map(&monomials);
        MatrixBasis { rows, cols, nvars, lo, hi, monomials, index }
    }

    /// The homogeneous degree-`j` space.
    pub fn homogeneous(rows: usize, cols: usize, nvars: usize, j: u32) -> Self {
        Self::new(rows, cols, nvars, j, j)
    }

    pub fn dim(&self) -> usize {
        self.monomials.len() * self.rows * self.cols
    }

    pub fn degrees(&self) -> (u32, u32) {
        (self.lo, self.hi)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// `(I, a, b)` for coordinate `k`.
    pub fn element(&self, k: usize) -> (&MultiIndex, usize, usize) {
        let cell = self.rows * self.cols;
        let pos = k % cell;
        (&self.monomials[k / cell], pos / self.cols, pos % self.cols)
    }

    pub fn index_of(&self, index: &MultiIndex, a: usize, b: usize) -> Option<usize> {
        self.index.get(index).map(|m| m * self.rows * self.cols + a * self.cols + b)
    }

    /// Weight of coordinate `k` in the inner product, `I!`.
    pub fn weight(&self, k: usize) -> Scalar {
        weight_of(self.element(k).0)
    }

    /// Number of coordinates of degree below `j`.
    pub fn count_below(&self, j: u32) -> usize {
        (self.lo..j.min(self.hi + 1)).map(|d| monomial_count(self.nvars, d)).sum::<usize>() * self.rows * self.cols
    }

    /// Coordinates of the part of `a` with degree in range.
    pub fn coords(&self, a: &MatrixJet) -> SparseVec {
        let mut pairs = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                for (k, v) in a.entry(r, c).terms() {
                    if let Some(i) = self.index_of(k, r, c) {
                        pairs.push((i, v.clone()));
                    }
                }
            }
        }
        SparseVec::from_pairs(pairs)
    }

    pub fn to_jet(&self, v: &SparseVec, truncation: u32) -> MatrixJet {
        let mut out = MatrixJet::zeros(self.rows, self.cols, self.nvars, truncation);
        for (k, c) in v.entries() {
            let (index, a, b) = self.element(*k);
            out.entry_mut(a, b).add_term(index.clone(), c.clone());
        }
        out
    }

    pub fn label(&self, k: usize) -> String {
        let (index, a, b) = self.element(k);
        unit_label(a, b, index)
    }
}

/// Which component(s) a Lie basis element occupies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    /// Both components, tied by the kind's constraint.
    Coupled,
}

/// Coordinates on the Lie algebra of a kind, degrees `lo..=hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieBasis {
    kind: GroupKind,
    m: usize,
    n: usize,
    nvars: usize,
    lo: u32,
    hi: u32,
    monomials: Vec<MultiIndex>,
}

impl LieBasis {
    pub fn new(kind: GroupKind, m: usize, n: usize, nvars: usize, lo: u32, hi: u32) -> Self {
        let lo = lo.max(1);
        let monomials = if lo <= hi { monomials_between(nvars, lo, hi) } else { Vec::new() };
        LieBasis { kind, m, n, nvars, lo, hi, monomials }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    fn per_monomial(&self) -> usize {
        match self.kind {
            GroupKind::Left | GroupKind::Conjugacy | GroupKind::Congruence => self.m * self.m,
            GroupKind::Right => self.n * self.n,
            GroupKind::TwoSided => self.m * self.m + self.n * self.n,
        }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len() * self.per_monomial()
    }

    pub fn degrees(&self) -> (u32, u32) {
        (self.lo, self.hi)
    }

    /// `(I, side, a, b)` for coordinate `k`.
    pub fn element(&self, k: usize) -> (&MultiIndex, Side, usize, usize) {
        let per = self.per_monomial();
        let index = &self.monomials[k / per];
        let pos = k % per;
        let (side, size, pos) = match self.kind {
            GroupKind::Left => (Side::Left, self.m, pos),
            GroupKind::Right => (Side::Right, self.n, pos),
            GroupKind::Conjugacy | GroupKind::Congruence => (Side::Coupled, self.m, pos),
            GroupKind::TwoSided if pos < self.m * self.m => (Side::Left, self.m, pos),
            GroupKind::TwoSided => (Side::Right, self.n, pos - self.m * self.m),
        };
        (index, side, pos / size, pos % size)
    }

    fn coordinate(&self, index: &MultiIndex, side: Side, a: usize, b: usize) -> Option<usize> {
        let d = index.degree();
        if d < self.lo || d > self.hi {
            return None;
        }
        let offset = (self.lo..d).map(|t| monomial_count(self.nvars, t)).sum::<usize>();
        let within = self.monomials[offset..].iter().position(|m| m == index)?;
        let base = (offset + within) * self.per_monomial();
        let pos = match (self.kind, side) {
            (GroupKind::TwoSided, Side::Right) => self.m * self.m + a * self.n + b,
            (GroupKind::Right, _) => a * self.n + b,
            _ => a * self.m + b,
        };
        Some(base + pos)
    }

    /// Weight of coordinate `k` in the pair inner product.
    pub fn weight(&self, k: usize) -> Scalar {
        let w = weight_of(self.element(k).0);
        if self.kind.is_coupled() {
            &w * &Scalar::from_int(2)
        } else {
            w
        }
    }

    /// Lie element with coordinates `v`.
    pub fn to_lie(&self, v: &SparseVec, truncation: u32) -> LieElementJet {
        let mut left = MatrixJet::zeros(self.m, self.m, self.nvars, truncation);
        let mut right = MatrixJet::zeros(self.n, self.n, self.nvars, truncation);
        for (k, c) in v.entries() {
            let (index, side, a, b) = self.element(*k);
            match side {
                Side::Left => {
                    left.entry_mut(a, b).add_term(index.clone(), c.clone());
                }
                Side::Right => {
                    right.entry_mut(a, b).add_term(index.clone(), c.clone());
                }
                Side::Coupled => {
                    left.entry_mut(a, b).add_term(index.clone(), c.clone());
                    if self.kind == GroupKind::Conjugacy {
                        right.entry_mut(a, b).add_term(index.clone(), c.clone());
                    } else {
                        right.entry_mut(b, a).add_term(index.clone(), -c);
                    }
                }
            }
        }
        LieElementJet::new_unchecked(self.kind, JetPair { left, right })
    }

    /// Coordinates of a Lie element of this kind (degrees in range only).
    pub fn coords(&self, nu: &LieElementJet) -> SparseVec {
        let mut pairs = Vec::new();
        let mut read = |m: &MatrixJet, side: Side| {
            for a in 0..m.rows() {
                for b in 0..m.cols() {
                    for (index, c) in m.entry(a, b).terms() {
                        if let Some(k) = self.coordinate(index, side, a, b) {
                            pairs.push((k, c.clone()));
                        }
                    }
                }
            }
        };
        match self.kind {
            GroupKind::Left => read(nu.left(), Side::Left),
            GroupKind::Right => read(nu.right(), Side::Right),
            GroupKind::TwoSided => {
                read(nu.left(), Side::Left);
                read(nu.right(), Side::Right);
            }
            GroupKind::Conjugacy | GroupKind::Congruence => read(nu.left(), Side::Coupled),
        }
        SparseVec::from_pairs(pairs)
    }

    pub fn label(&self, k: usize) -> String {
        let (index, side, a, b) = self.element(k);
        let tag = match side {
            Side::Left => "l",
            Side::Right => "r",
            Side::Coupled => "c",
        };
        format!("{tag}:{}", unit_label(a, b, index))
    }

    /// Image of basis element `k` under `ν ↦ π_hi(ν_l·A − A·ν_r)`, in `codomain`.
    fn image(&self, k: usize, a: &MatrixJet, codomain: &MatrixBasis) -> SparseVec {
        let (index, side, p, q) = self.element(k);
        let (rows, cols) = a.shape();
        let mut pairs = Vec::new();
        let mut push = |r: usize, c: usize, s: &SeriesJet, sign: bool| {
            for (t, v) in s.terms() {
                let target = t.add(index);
                if let Some(i) = codomain.index_of(&target, r, c) {
                    pairs.push((i, if sign { v.clone() } else { -v }));
                }
            }
        };
        let left = |push: &mut dyn FnMut(usize, usize, &SeriesJet, bool)| {
            // E_pq·A: row p picks up row q of A
            for c in 0..cols {
                push(p, c, a.entry(q, c), true);
            }
        };
        match side {
            Side::Left => left(&mut push),
            Side::Right => {
                // −A·E_pq: column q picks up −(column p of A)
                for r in 0..rows {
                    push(r, q, a.entry(r, p), false);
                }
            }
            Side::Coupled => {
                left(&mut push);
                if self.kind == GroupKind::Conjugacy {
                    for r in 0..rows {
                        push(r, q, a.entry(r, p), false);
                    }
                } else {
                    // ν_r = −E_qp, so −A·ν_r = A·E_qp: column p picks up column q
                    for r in 0..rows {
                        push(r, p, a.entry(r, q), true);
                    }
                }
            }
        }
        SparseVec::from_pairs(pairs)
    }
}

/// Either kind of coordinate system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GradedBasis {
    Matrix(MatrixBasis),
    Lie(LieBasis),
}

impl GradedBasis {
    pub fn dim(&self) -> usize {
        match self {
            GradedBasis::Matrix(b) => b.dim(),
            GradedBasis::Lie(b) => b.dim(),
        }
    }

    pub fn weight(&self, k: usize) -> Scalar {
        match self {
            GradedBasis::Matrix(b) => b.weight(k),
            GradedBasis::Lie(b) => b.weight(k),
        }
    }

    pub fn label(&self, k: usize) -> String {
        match self {
            GradedBasis::Matrix(b) => b.label(k),
            GradedBasis::Lie(b) => b.label(k),
        }
    }
}

fn dump_vector(out: &mut String, basis: &GradedBasis, v: &SparseVec) {
    let parts: Vec<String> = v.entries().iter().map(|(k, c)| format!("{c}·{}", basis.label(*k))).collect();
    out.push_str(if parts.is_empty() { "0" } else { "" });
    out.push_str(&parts.join(" + "));
}

/// A subspace given by generators in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSubspace {
    ambient: GradedBasis,
    generators: Vec<SparseVec>,
}

impl GradedSubspace {
    /// Span of arbitrary vectors, brought to canonical form.
    pub fn span(ambient: GradedBasis, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        GradedSubspace { ambient, generators: rref_basis(vectors) }
    }

    pub fn zero(ambient: GradedBasis) -> Self {
        GradedSubspace { ambient, generators: Vec::new() }
    }

    pub fn full(ambient: GradedBasis) -> Self {
        let generators = (0..ambient.dim()).map(SparseVec::unit).collect();
        GradedSubspace { ambient, generators }
    }

    pub fn ambient(&self) -> &GradedBasis {
        &self.ambient
    }

    pub fn generators(&self) -> &[SparseVec] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.generators.iter().map(|g| g.leading().expect("nonzero generator")).collect()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.residual(v).is_zero()
    }

    /// `v − Σ v[p_i]·g_i`: zero exactly when `v` lies in the subspace.
    fn residual(&self, v: &SparseVec) -> SparseVec {
        let mut r = v.clone();
        for g in &self.generators {
            let p = g.leading().unwrap();
            let c = r.get(p);
            if !c.is_zero() {
                r = r.axpy(&-c, g);
            }
        }
        r
    }

    /// Generators as matrix jets, for subspaces of a matrix space.
    pub fn generator_jets(&self, truncation: u32) -> Vec<MatrixJet> {
        match &self.ambient {
            GradedBasis::Matrix(b) => self.generators.iter().map(|g| b.to_jet(g, truncation)).collect(),
            GradedBasis::Lie(_) => Vec::new(),
        }
    }

    /// One generator per line with basis labels.
    pub fn dump(&self) -> String {
        let mut out = format!("dim {} of {}\n", self.dim(), self.ambient.dim());
        for (i, g) in self.generators.iter().enumerate() {
            let _ = write!(out, "  g{i} = ");
            dump_vector(&mut out, &self.ambient, g);
            out.push('\n');
        }
        out
    }
}

/// The matrix of a linear map in the chosen bases, stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearOperatorMatrix {
    pub domain: LieBasis,
    pub codomain: MatrixBasis,
    pub columns: Vec<SparseVec>,
}

impl LinearOperatorMatrix {
    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(usize::MAX);
        for c in &self.columns {
            e.insert(c);
        }
        e.rank()
    }

    pub fn dump(&self) -> String {
        let codomain = GradedBasis::Matrix(self.codomain.clone());
        let mut out = format!("{} columns -> {} rows\n", self.columns.len(), self.codomain.dim());
        for (k, c) in self.columns.iter().enumerate() {
            let _ = write!(out, "  {} -> ", self.domain.label(k));
            dump_vector(&mut out, &codomain, c);
            out.push('\n');
        }
        out
    }
}

/// Matrix of `ν ↦ π_j(ν·π_{j−1}A)` from Lie jets of degrees `1..=j` to matrix
/// jets of degrees `0..=j`.
pub fn assemble_action(a: &MatrixJet, kind: GroupKind, j: u32, limits: &Limits) -> Result<LinearOperatorMatrix> {
    kind.check_shape(a.rows(), a.cols())?;
    if j > a.truncation() {
        return Err(Error::DegreeOutOfRange { degree: j, truncation: a.truncation() });
    }
    let (m, n) = a.shape();
    let domain = LieBasis::new(kind, m, n, a.nvars(), 1, j);
    limits.check(domain.dim())?;
    let codomain = MatrixBasis::new(m, n, a.nvars(), 0, j);
    let base = a.project_below(j);
    let columns = (0..domain.dim()).into_par_iter().map(|k| domain.image(k, &base, &codomain)).collect();
    Ok(LinearOperatorMatrix { domain, codomain, columns })
}

/// Null space of an operator, in reduced echelon form.
pub fn kernel(op: &LinearOperatorMatrix) -> GradedSubspace {
    let rows = op.codomain.dim();
    let mut e = Echelon::new(rows);
    let residuals: Vec<SparseVec> = op
        .columns
        .iter()
        .enumerate()
        .filter_map(|(k, c)| e.insert(&c.clone().concat(SparseVec::unit(rows + k))))
        .map(|r| r.slice(rows, rows + op.columns.len()))
        .collect();
    GradedSubspace::span(GradedBasis::Lie(op.domain.clone()), residuals)
}

/// Column span of an operator.
pub fn image(op: &LinearOperatorMatrix) -> GradedSubspace {
    GradedSubspace::span(GradedBasis::Matrix(op.codomain.clone()), op.columns.iter().cloned())
}

/// `V^(j)` together with what is needed to pull its elements back to `ν`.
#[derive(Clone, Debug)]
pub struct VSpace {
    pub degree: u32,
    pub kind: GroupKind,
    /// The subspace of homogeneous degree-`j` matrices.
    pub space: GradedSubspace,
    /// Lie basis elements whose image vanishes.
    pub zero_columns: Vec<usize>,
    pub operator: LinearOperatorMatrix,
    /// Rank of `π_j ∘ S′` on the whole Lie basis.
    rank: usize,
    truncation: u32,
}

impl VSpace {
    pub fn lie_basis(&self) -> &LieBasis {
        &self.operator.domain
    }

    pub fn matrix_basis(&self) -> &MatrixBasis {
        match self.space.ambient() {
            GradedBasis::Matrix(b) => b,
            GradedBasis::Lie(_) => unreachable!("V lives in a matrix space"),
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension of the stabilizer algebra of the `j`-jet.
    pub fn stabilizer_dim(&self) -> usize {
        self.operator.columns.len() - self.rank
    }

    /// Lie coordinates of a `ν` mapping onto each generator, in generator
    /// order, and a basis of the stabilizer algebra.
    ///
    /// This runs a full elimination with the identity attached, so it is far
    /// more expensive than [`v_space`] itself.
    pub fn pullback(&self) -> (Vec<SparseVec>, Vec<SparseVec>) {
        let op = &self.operator;
        let total = op.codomain.dim();
        let low = op.codomain.count_below(self.degree);
        let width = op.columns.len();
        // stage 1: Lie elements whose image has no part below degree j
        let mut stage1 = Echelon::new(low);
        let mut survivors = Vec::new();
        for (k, c) in op.columns.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if let Some(r) = stage1.insert(&c.clone().concat(SparseVec::unit(total + k))) {
                survivors.push(r);
            }
        }
        // stage 2: split those into preimages of V and the stabilizer
        let mut stage2 = Echelon::new(total);
        let mut stabilizer: Vec<SparseVec> = self.zero_columns.iter().map(|&k| SparseVec::unit(k)).collect();
        for r in &survivors {
            if let Some(res) = stage2.insert(r) {
                stabilizer.push(res.slice(total, total + width));
            }
        }
        let witnesses = stage2.sorted_rows().into_iter().map(|(_, row)| row.slice(total, total + width)).collect();
        (witnesses, stabilizer)
    }

    /// Basis of the full stabilizer algebra (Lie coordinates).
    pub fn stabilizer_basis(&self) -> Vec<SparseVec> {
        self.pullback().1
    }

    /// Dump for `--explain`.
    pub fn dump(&self) -> String {
        let mut out = format!("degree {} ({})\n", self.degree, self.kind);
        out.push_str("operator ");
        out.push_str(&self.operator.dump());
        out.push_str("V ");
        out.push_str(&self.space.dump());
        let lie = GradedBasis::Lie(self.lie_basis().clone());
        for (i, w) in self.pullback().0.iter().enumerate() {
            let _ = write!(out, "  witness g{i} <- ");
            dump_vector(&mut out, &lie, w);
            out.push('\n');
        }
        let _ = writeln!(out, "stabilizer dim {}", self.stabilizer_dim());
        out
    }
}

/// `V^(j)(A) = {π_j(νA) : ν ∈ Lie, π_{j−1}(νA) = 0}`, computed from `π_{j−1}A`.
///
/// In the reduced echelon form of the operator's column space, with the
/// coordinates below degree `j` ordered first, the rows whose pivot lies in
/// degree `j` are exactly a reduced basis of the columns with no lower part.
pub fn v_space(a: &MatrixJet, kind: GroupKind, j: u32, limits: &Limits) -> Result<VSpace> {
    if j == 0 {
        return Err(Error::DegreeOutOfRange { degree: 0, truncation: a.truncation() });
    }
    let op = assemble_action(a, kind, j, limits)?;
    let low = op.codomain.count_below(j);
    let total = op.codomain.dim();
    let zero_columns: Vec<usize> = (0..op.columns.len()).filter(|&k| op.columns[k].is_zero()).collect();
    let echelon = rref_fast(&op.columns);
    let rank = echelon.len();
    let generators: Vec<SparseVec> =
        echelon.into_iter().filter(|r| r.leading().is_some_and(|l| l >= low)).map(|r| r.slice(low, total)).collect();
    let basis = MatrixBasis::homogeneous(a.rows(), a.cols(), a.nvars(), j);
    Ok(VSpace {
        degree: j,
        kind,
        space: GradedSubspace { ambient: GradedBasis::Matrix(basis), generators },
        zero_columns,
        operator: op,
        rank,
        truncation: a.truncation(),
    })
}

/// Orthogonal complement inside the ambient space.
pub fn w_complement(v: &GradedSubspace) -> GradedSubspace {
    let ambient = v.ambient().clone();
    let rows: Vec<SparseVec> = v
        .generators()
        .iter()
        .map(|g| SparseVec::from_pairs(g.entries().iter().map(|(k, c)| (*k, &c.conj() * &ambient.weight(*k)))))
        .collect();
    let generators = null_space(&rows, ambient.dim());
    GradedSubspace { ambient, generators }
}

fn homogeneous_coords(h: &MatrixJet, basis: &MatrixBasis) -> Result<SparseVec> {
    let (lo, hi) = basis.degrees();
    if h.shape() != basis.shape() || h.nvars() != basis.nvars() {
        return Err(Error::ShapeMismatch("jet does not live in the subspace's ambient space".into()));
    }
    if h.valuation().is_some_and(|v| v < lo) || h.degree().is_some_and(|d| d > hi) {
        return Err(Error::InvalidInput(format!("expected a jet with degrees in {lo}..={hi}")));
    }
    Ok(basis.coords(h))
}

/// `h = v + w` with `v ∈ V` and `w ⊥ V`.
pub fn decompose(h: &MatrixJet, v: &GradedSubspace) -> Result<(MatrixJet, MatrixJet)> {
    let GradedBasis::Matrix(basis) = v.ambient() else {
        return Err(Error::InvalidInput("decompose needs a matrix subspace".into()));
    };
    let coords = homogeneous_coords(h, basis)?;
    let vpart = project_onto(&coords, v.generators(), |k| basis.weight(k));
    let vj = basis.to_jet(&vpart, h.truncation());
    let wj = h.sub(&vj)?;
    Ok((vj, wj))
}

/// A maximal independent subset of `rows`, found modulo a prime when that
/// already reaches `rank` and by exact elimination otherwise.
fn independent_rows(rows: &[SparseVec], rank: usize) -> Vec<usize> {
    if rows.iter().all(|r| r.entries().iter().all(|(_, c)| c.is_real())) {
        let real: Vec<Vec<(usize, BigRational)>> =
            rows.iter().map(|r| r.entries().iter().map(|(k, c)| (*k, c.re().clone())).collect()).collect();
        if let Some(kept) = modular::independent_rows(&real, modular::prime(0)) {
            if kept.len() == rank {
                return kept.into_iter().map(|(i, _)| i).collect();
            }
        }
    }
    let mut echelon = Echelon::new(usize::MAX);
    (0..rows.len()).filter(|&i| !rows[i].is_zero() && echelon.insert(&rows[i]).is_none()).collect()
}

/// Minimum-norm `ν` with `π_j(ν·π_{j−1}A) = v` and no part below degree `j`.
///
/// The minimizer lies in the weighted row space of the operator `L`:
/// `ν = W⁻¹Lᴴy` with `(LW⁻¹Lᴴ)y = t`, where `t` is `v` padded with zeros in
/// the lower degrees. Only an independent set of rows is kept, and the Gram
/// system is solved one support component at a time.
/// Minimum-norm solution of `rows[i]·ν = target[i]` (`i ∈ comp`) for real
/// data, with integer arithmetic throughout. With `rows[i] = R_i / r_i` over
/// integers and integral weights `w_k`, `ν = Σ_i y_i rows[i] / w` where the
/// scaled unknowns `z_i = y_i / r_i` solve an integral Gram system; `ν`'s
/// numerators are then plain integer combinations of the `R_i`. The result
/// is checked against every constraint, so `None` only means "use the
/// rational route".
fn min_norm_integral(
    rows: &[SparseVec],
    target: &[Scalar],
    comp: &[usize],
    weight: impl Fn(usize) -> Scalar,
) -> Option<SparseVec> {
    use num_bigint::BigInt;
    use crate::ratarith as q;
    if comp.iter().any(|&i| !target[i].is_real() || rows[i].entries().iter().any(|(_, c)| !c.is_real())) {
        return None;
    }
    let cleared: Vec<(BigInt, Vec<(usize, BigInt)>)> = comp
        .iter()
        .map(|&i| {
            let den = rows[i].entries().iter().fold(BigInt::one(), |l, (_, c)| q::lcm(&l, c.re().denom()));
            let ints = rows[i].entries().iter().map(|(k, c)| (*k, c.re().numer() * (&den / c.re().denom()))).collect();
            (den, ints)
        })
        .collect();
    let mut weights: HashMap<usize, BigInt> = HashMap::new();
    for (_, r) in &cleared {
        for (k, _) in r {
            weights.entry(*k).or_insert_with(|| weight(*k).re().to_integer());
        }
    }
    let w_all = weights.values().fold(BigInt::one(), q::lcm_ref);
    let scale: HashMap<usize, BigInt> = weights.iter().map(|(k, w)| (*k, &w_all / w)).collect();
    let dot = |a: &[(usize, BigInt)], b: &[(usize, BigInt)]| {
        let (mut i, mut j, mut acc) = (0, 0, BigInt::zero());
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += &a[i].1 * &b[j].1 * &scale[&a[i].0];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    };
    let n = comp.len();
    let mut gram = vec![vec![BigInt::zero(); n]; n];
    for a in 0..n {
        for b in a..n {
            let g = dot(&cleared[a].1, &cleared[b].1);
            gram[b][a] = g.clone();
            gram[a][b] = g;
        }
    }
    // right-hand side t_a·r_a·W, cleared by one more denominator
    let rhs: Vec<BigRational> =
        comp.iter().zip(&cleared).map(|(&i, (r, _))| target[i].re() * BigRational::from_integer(r * &w_all)).collect();
    let t_den = rhs.iter().fold(BigInt::one(), |l, x| q::lcm(&l, x.denom()));
    let rhs: Vec<BigInt> = rhs.iter().map(|x| x.numer() * (&t_den / x.denom())).collect();
    let sol = modular::Lifter::new(&gram)?.solve(&rhs, false)?;
    let mut numer: std::collections::BTreeMap<usize, BigInt> = std::collections::BTreeMap::new();
    for (z, (_, r)) in sol.numer.iter().zip(&cleared) {
        if z.is_zero() {
            continue;
        }
        for (k, c) in r {
            *numer.entry(*k).or_default() += z * c;
        }
    }
    for (k, v) in numer.iter_mut() {
        *v *= &scale[k];
    }
    // ν_k = numer_k / (denom·t_den·W); verify rows·ν = target exactly
    let den = &sol.denom * &t_den * &w_all;
    for (&i, (r, ints)) in comp.iter().zip(&cleared) {
        let lhs: BigInt = ints.iter().filter_map(|(k, c)| numer.get(k).map(|v| c * v)).sum();
        let t = target[i].re();
        if &lhs * t.denom() != t.numer() * r * &den {
            return None;
        }
    }
    let factors = [sol.denom.clone(), &t_den * &w_all];
    Some(SparseVec::from_pairs(
        numer.into_iter().map(|(k, v)| (k, Scalar::real(q::reduce_by_factors(v, &factors)))),
    ))
}

/// Same contract as [`min_norm_integral`] in plain rational arithmetic:
/// `ν = Σ y_i conj(rows[i]) / w` with `y` solving the weighted Gram system.
fn min_norm_rational(rows: &[SparseVec], target: &[Scalar], comp: &[usize], weight: impl Fn(usize) -> Scalar) -> SparseVec {
    let inv_weight = |k: usize| weight(k).inv().expect("positive weight");
    let gram: Vec<Vec<Scalar>> =
        comp.iter().map(|&i| comp.iter().map(|&k| rows[i].weighted_dot(&rows[k], inv_weight)).collect()).collect();
    let rhs = comp.iter().map(|&i| target[i].clone()).collect();
    let y = solve_dense(gram, rhs).expect("independent rows give a definite Gram matrix");
    let mut nu = SparseVec::new();
    for (yi, &i) in y.iter().zip(comp) {
        let scaled = SparseVec::from_pairs(rows[i].entries().iter().map(|(k, c)| (*k, &c.conj() * &inv_weight(*k))));
        nu = nu.axpy(yi, &scaled);
    }
    nu
}

pub fn preimage_nu(v: &MatrixJet, vs: &VSpace) -> Result<LieElementJet> {
    let basis = vs.matrix_basis();
    let coords = homogeneous_coords(v, basis)?;
    let mut rest = coords.clone();
    for g in vs.space.generators() {
        let c = rest.get(g.leading().unwrap());
        if !c.is_zero() {
            rest = rest.axpy(&-&c, g);
        }
    }
    if !rest.is_zero() {
        return Err(Error::NotInSubspace(format!("degree-{} matrix", vs.degree)));
    }
    let lie = vs.lie_basis();
    if coords.is_zero() {
        return Ok(lie.to_lie(&SparseVec::new(), vs.truncation));
    }
    let op = &vs.operator;
    let low = op.codomain.count_below(vs.degree);
    let mut rows = vec![Vec::new(); op.codomain.dim()];
    for (k, col) in op.columns.iter().enumerate() {
        for (i, c) in col.entries() {
            rows[*i].push((k, c.clone()));
        }
    }
    let rows: Vec<SparseVec> = rows.into_iter().map(SparseVec::from_pairs).collect();
    let rank = vs.rank();
    let (kept, target) = independent_rows(&rows, rank)
        .into_iter()
        .map(|i| (rows[i].clone(), if i < low { Scalar::zero() } else { coords.get(i - low) }))
        .unzip::<_, _, Vec<_>, Vec<_>>();
    let mut nu = SparseVec::new();
    for comp in support_components(&kept) {
        if comp.iter().all(|&i| target[i].is_zero()) {
            continue;
        }
        let weight = |k: usize| lie.weight(k);
        let part = min_norm_integral(&kept, &target, &comp, weight)
            .unwrap_or_else(|| min_norm_rational(&kept, &target, &comp, weight));
        nu = nu.add(&part);
    }
    Ok(lie.to_lie(&nu, vs.truncation))
}
