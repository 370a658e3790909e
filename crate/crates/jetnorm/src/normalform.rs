//! Normal forms, certificates and the checks built on them.
//!
//! [`normal_form`] walks the degrees `j = 1..=N`. At each step the
//! degree-`j` part of the current jet is split as `v + w` with `v ∈ V^(j)` and
//! `w ⊥ V^(j)`; the `v` part is removed by `exp(−ν)` for the minimum-norm
//! `ν` mapping onto it, which leaves lower degrees untouched. The composite
//! of those steps is returned as a certificate.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense::ConstMatrix;
use crate::error::{Error, Result};
use crate::gradedlin::{decompose, preimage_nu, v_space, w_complement, Limits, MatrixBasis};
use crate::groups::{invert_jet, GroupElementJet, GroupKind};
use crate::jets::{default_names, monomials, monomials_between, MatrixJet, MultiIndex, SeriesJet};
use crate::linalg::{Echelon, SparseVec};
use crate::scalars::Scalar;

/// Dimensions seen at one degree of the reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeLog {
    pub degree: u32,
    pub dim_v: usize,
    pub dim_w: usize,
    /// `⟨v_j, v_j⟩` of the removed component.
    #[serde(serialize_with = "crate::scalars::serialize_rational")]
    pub removed_norm2: BigRational,
}

#[derive(Clone, Debug, Default)]
pub struct NormalFormOptions {
    pub limits: Limits,
    /// Keep a text dump of every operator and subspace.
    pub explain: bool,
    /// First bring the constant term to a canonical shape with a constant
    /// group element (left, right and two-sided only).
    pub full_g: bool,
}

#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub input: MatrixJet,
    pub kind: GroupKind,
    pub normal_form: MatrixJet,
    /// Unipotent `g` with `g.(h.A) = B`, where `h` is the preprocessing step.
    pub certificate: GroupElementJet,
    /// Constant element applied before the unipotent pass, if requested.
    pub preprocessing: Option<GroupElementJet>,
    pub log: Vec<DegreeLog>,
    pub warnings: Vec<String>,
    pub explain: Vec<String>,
}

impl NormalFormResult {
    /// The element taking the input to the normal form.
    pub fn full_certificate(&self) -> Result<GroupElementJet> {
        match &self.preprocessing {
            Some(h) => self.certificate.compose(h),
            None => Ok(self.certificate.clone()),
        }
    }
}

/// Whether the constant term is `λ·1`; returns `λ`.
pub fn scalar_constant(a: &MatrixJet) -> Option<Scalar> {
    let c = a.constant_term();
    if !a.is_square() {
        return None;
    }
    let lambda = c.get(0, 0).clone();
    (c == ConstMatrix::identity(a.rows()).scale(&lambda)).then_some(lambda)
}

/// Constant element bringing `A_0` to rank normal form (two-sided), reduced
/// row echelon form (left) or reduced column echelon form (right).
pub fn full_g_preprocess(a: &MatrixJet, kind: GroupKind) -> Result<GroupElementJet> {
    let (m, n, p, order) = (a.rows(), a.cols(), a.nvars(), a.truncation());
    let a0 = a.constant_term();
    let constant = |u: ConstMatrix, v: ConstMatrix| {
        GroupElementJet::new(kind, MatrixJet::constant(&u, p, order), MatrixJet::constant(&v, p, order))
    };
    match kind {
        GroupKind::TwoSided => {
            let (pm, q, _) = a0.rank_normal_form();
            constant(pm, q.inverse()?)
        }
        GroupKind::Left => constant(a0.rref_with_transform().2, ConstMatrix::identity(n)),
        GroupKind::Right => {
            // (T·A_0ᵀ)ᵀ = A_0·Tᵀ, so V = (Tᵀ)⁻¹
            let t = a0.transpose().rref_with_transform().2;
            constant(ConstMatrix::identity(m), t.transpose().inverse()?)
        }
        GroupKind::Conjugacy | GroupKind::Congruence => {
            Err(Error::Unsupported(format!("constant preprocessing is not available for {kind}")))
        }
    }
}

/// The unipotent-group normal form of `a` through its truncation order.
pub fn normal_form(a: &MatrixJet, kind: GroupKind, opts: &NormalFormOptions) -> Result<NormalFormResult> {
    kind.check_shape(a.rows(), a.cols())?;
    let (m, n, p, order) = (a.rows(), a.cols(), a.nvars(), a.truncation());
    let mut warnings = Vec::new();
    let preprocessing = if opts.full_g { Some(full_g_preprocess(a, kind)?) } else { None };
    let mut b = match &preprocessing {
        Some(h) => h.act(a)?,
        None => a.clone(),
    };
    if kind == GroupKind::Conjugacy && scalar_constant(&b).is_none() {
        warnings.push(
            "constant term is not a multiple of the identity; the differential relations for conjugacy do not apply"
                .into(),
        );
    }
    let mut g = GroupElementJet::identity(kind, m, n, p, order);
    let mut log = Vec::new();
    let mut explain = Vec::new();
    for j in 1..=order {
        let vs = v_space(&b, kind, j, &opts.limits)?;
        let h = b.homogeneous(j)?;
        let (v, _w) = decompose(&h, &vs.space)?;
        let dim_v = vs.dim();
        log.push(DegreeLog {
            degree: j,
            dim_v,
            dim_w: vs.matrix_basis().dim() - dim_v,
            removed_norm2: v.norm_squared(),
        });
        if opts.explain {
            explain.push(vs.dump());
        }
        if v.is_zero() {
            continue;
        }
        let nu = preimage_nu(&v, &vs)?;
        let (back, step) = nu.exp_pair()?;
        // exp(−ν) fixes degrees below j and leaves w in degree j, so the
        // last step needs no action at all.
        b = if j == order { b.sub(&v)? } else { step.act_with_inverse(&back, &b)? };
        g = step.compose(&g)?;
    }
    Ok(NormalFormResult {
        input: a.clone(),
        kind,
        normal_form: b,
        certificate: g,
        preprocessing,
        log,
        warnings,
        explain,
    })
}

/// Outcome of re-checking a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub ok: bool,
    pub issues: Vec<String>,
}

/// Recomputes `g.A` and compares it with the claimed normal form.
pub fn verify_certificate(r: &NormalFormResult) -> CertificateCheck {
    let mut issues = Vec::new();
    let g = &r.certificate;
    if g.kind() != r.kind {
        issues.push(format!("certificate is a {} element, expected {}", g.kind(), r.kind));
    }
    if !g.is_unipotent() {
        issues.push("certificate is not unipotent".into());
    }
    if let Err(e) = GroupElementJet::new(r.kind, g.u().clone(), g.v().clone()) {
        issues.push(format!("certificate is not a group element: {e}"));
    }
    let start = match &r.preprocessing {
        Some(h) => h.act(&r.input),
        None => Ok(r.input.clone()),
    };
    match start.and_then(|s| g.act(&s)) {
        Ok(image) => {
            if let Some(diff) = first_difference(&image, &r.normal_form) {
                issues.push(diff);
            }
        }
        Err(e) => issues.push(format!("cannot apply certificate: {e}")),
    }
    CertificateCheck { ok: issues.is_empty(), issues }
}

fn first_difference(a: &MatrixJet, b: &MatrixJet) -> Option<String> {
    if a.shape() != b.shape() || a.truncation() != b.truncation() {
        return Some("shape or truncation differs".into());
    }
    let d = a.sub(b).ok()?;
    let names = default_names(a.nvars());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if let Some((k, _)) = d.entry(i, j).terms().iter().next() {
                let mono = SeriesJet::monomial(a.nvars(), k.degree(), k.clone(), Scalar::one()).to_text(&names);
                return Some(format!(
                    "entry ({}, {}) coefficient of {mono}: got {}, expected {}",
                    i + 1,
                    j + 1,
                    a.entry(i, j).coefficient(k),
                    b.entry(i, j).coefficient(k)
                ));
            }
        }
    }
    None
}

/// One differential relation evaluated on one homogeneous degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PdeCheck {
    pub relation: String,
    pub degree: u32,
    pub passed: bool,
    /// First nonzero coefficient of the residual, when the check fails.
    pub first_nonzero: Option<String>,
    #[serde(skip)]
    witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PdeReport {
    pub kind: GroupKind,
    pub k: u32,
    /// Scalar constant removed before checking (conjugacy only).
    pub lambda: Option<Scalar>,
    pub checks: Vec<PdeCheck>,
    pub passed: bool,
}

impl PdeReport {
    /// Re-renders residual terms with the given variable names.
    pub fn with_names(mut self, vars: &[String]) -> Self {
        for c in &mut self.checks {
            c.first_nonzero = c.witness.as_ref().map(|w| w.render(vars));
        }
        self
    }
}

/// First nonzero term of a residual: entry position and monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Witness(usize, usize, SeriesJet);

impl Witness {
    fn render(&self, vars: &[String]) -> String {
        format!("entry ({}, {}): {}", self.0 + 1, self.1 + 1, self.2.to_text(vars))
    }
}

fn first_nonzero(m: &MatrixJet) -> Option<Witness> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if let Some((k, c)) = m.entry(i, j).terms().iter().next() {
                return Some(Witness(i, j, SeriesJet::monomial(m.nvars(), k.degree(), k.clone(), c.clone())));
            }
        }
    }
    None
}

/// Evaluates the kind's differential relations on `b = B − π_k B`, one
/// homogeneous degree at a time, with leading part `A_k = B^(k)`.
pub fn check_pde(bmat: &MatrixJet, k: u32, kind: GroupKind) -> Result<PdeReport> {
    kind.check_shape(bmat.rows(), bmat.cols())?;
    if k > bmat.truncation() {
        return Err(Error::DegreeOutOfRange { degree: k, truncation: bmat.truncation() });
    }
    let (shifted, lambda) = if kind == GroupKind::Conjugacy {
        let lambda = scalar_constant(bmat).ok_or_else(|| {
            Error::InvalidInput("conjugacy relations need a constant term that is a multiple of the identity".into())
        })?;
        let id = MatrixJet::identity(bmat.rows(), bmat.nvars(), bmat.truncation());
        (bmat.sub(&id.scale(&lambda))?, Some(lambda))
    } else {
        (bmat.clone(), None)
    };
    let ak = shifted.homogeneous(k)?;
    let mut checks = Vec::new();
    for d in k + 1..=bmat.truncation() {
        let part = shifted.homogeneous(d)?;
        // left: (A_k*)ᵀ(∂) bᵀ (m×m), right: A_k*(∂) b (n×n)
        let left = || ak.transpose().apply_diff_op(&part.transpose());
        let right = || ak.apply_diff_op(&part);
        let residuals: Vec<(&str, MatrixJet)> = match kind {
            GroupKind::Left => vec![("left", left()?)],
            GroupKind::Right => vec![("right", right()?)],
            GroupKind::TwoSided => vec![("left", left()?), ("right", right()?)],
            GroupKind::Congruence => vec![("congruence", left()?.add(&right()?)?)],
            GroupKind::Conjugacy => vec![("conjugacy", left()?.transpose().sub(&right()?)?)],
        };
        for (name, r) in residuals {
            let witness = first_nonzero(&r);
            let names = default_names(bmat.nvars());
            checks.push(PdeCheck {
                relation: name.into(),
                degree: d,
                passed: witness.is_none(),
                first_nonzero: witness.as_ref().map(|w| w.render(&names)),
                witness,
            });
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(PdeReport { kind, k, lambda, checks, passed })
}

/// Verdict of the image test at one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterminacyDegree {
    pub degree: u32,
    /// Dimension of the homogeneous degree-`j` matrices reached.
    pub dim_reached: usize,
    pub dim_space: usize,
    pub contained: bool,
    /// Basis of the unreached directions (orthogonal complement), as text.
    pub obstructions: Vec<String>,
    /// Conjugacy only: every `1·x^I` of this degree is unreachable.
    pub trace_obstruction: bool,
    #[serde(skip)]
    obstruction_jets: Vec<MatrixJet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterminacyReport {
    pub kind: GroupKind,
    pub k: u32,
    pub j_max: u32,
    pub degrees: Vec<DeterminacyDegree>,
    pub first_failure: Option<u32>,
    pub note: String,
}

impl DeterminacyReport {
    /// Re-renders the obstructions with the given variable names.
    pub fn with_names(mut self, vars: &[String]) -> Self {
        for d in &mut self.degrees {
            d.obstructions = d.obstruction_jets.iter().map(|g| g.to_text(vars)).collect();
        }
        self
    }
}

/// Tests, for `j = k+1..=j_max`, whether every homogeneous degree-`j` matrix
/// lies in `π_j S′_A(0)(Lie)`.
pub fn determinacy_report(a: &MatrixJet, kind: GroupKind, k: u32, j_max: u32, limits: &Limits) -> Result<DeterminacyReport> {
    kind.check_shape(a.rows(), a.cols())?;
    if j_max > a.truncation() {
        return Err(Error::DegreeOutOfRange { degree: j_max, truncation: a.truncation() });
    }
    let names = default_names(a.nvars());
    let mut degrees = Vec::new();
    for j in (k + 1).max(1)..=j_max {
        let vs = v_space(a, kind, j, limits)?;
        let basis = vs.matrix_basis().clone();
        let w = w_complement(&vs.space);
        let contained = w.dim() == 0;
        let trace_obstruction = kind == GroupKind::Conjugacy
            && !contained
            && monomials(a.nvars(), j).iter().all(|index| {
                let id = SparseVec::from_pairs(
                    (0..a.rows()).map(|i| (basis.index_of(index, i, i).unwrap(), Scalar::one())),
                );
                vs.space.generators().iter().all(|g| id.weighted_dot(g, |c| basis.weight(c)).is_zero())
            });
        let missed = w.generator_jets(a.truncation());
        degrees.push(DeterminacyDegree {
            degree: j,
            dim_reached: vs.dim(),
            dim_space: basis.dim(),
            contained,
            obstructions: missed.iter().map(|g| g.to_text(&names)).collect(),
            trace_obstruction,
            obstruction_jets: missed,
        });
    }
    let first_failure = degrees.iter().find(|d| !d.contained).map(|d| d.degree);
    let note = match first_failure {
        None => format!(
            "every degree {}..={j_max} is reached; this supports {k}-determinacy up to degree {j_max} but does not prove it",
            k + 1
        ),
        Some(j) => format!("degree {j} is not reached, so the matrix is not {}-determined for the unipotent group", j - 1),
    };
    Ok(DeterminacyReport { kind, k, j_max, degrees, first_failure, note })
}

const WITNESS_SEED: u64 = 0x6a65_746e_6f72_6d00;
const WITNESS_ATTEMPTS: u32 = 64;

/// Looks for `g` with `π_j(g.A) = π_j B` by solving `π_j(U·A − B·V) = 0`.
///
/// The returned element has truncation order `j`. `None` means no invertible
/// solution turned up in the deterministic search; for a one-dimensional
/// solution space that is conclusive.
pub fn jet_equivalence(a: &MatrixJet, b: &MatrixJet, kind: GroupKind, j: u32) -> Result<Option<GroupElementJet>> {
    if kind == GroupKind::Congruence {
        return Err(Error::Unsupported(
            "congruence equivalence is quadratic in U (U·A·Uᵀ = B) and cannot be solved as a linear system".into(),
        ));
    }
    kind.check_shape(a.rows(), a.cols())?;
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch("A and B must have the same shape".into()));
    }
    if a.nvars() != b.nvars() {
        return Err(Error::VariableMismatch { left: a.nvars(), right: b.nvars() });
    }
    let top = a.truncation().min(b.truncation());
    if j > top {
        return Err(Error::DegreeOutOfRange { degree: j, truncation: top });
    }
    let (m, n, p) = (a.rows(), a.cols(), a.nvars());
    let (a, b) = (a.truncate(j), b.truncate(j));
    if a == b {
        return Ok(Some(GroupElementJet::identity(kind, m, n, p, j)));
    }

    // unknowns: U_I then V_I for |I| ≤ j, or a single scalar for a side fixed to c·1
    let mons = monomials_between(p, 0, j);
    let eqs = MatrixBasis::new(m, n, p, 0, j);
    let zero = MultiIndex::zero(p);
    let u_free = matches!(kind, GroupKind::Left | GroupKind::TwoSided | GroupKind::Conjugacy);
    let v_free = matches!(kind, GroupKind::Right | GroupKind::TwoSided);
    // each unknown is (which side, monomial, row, col); a scaled identity is one unknown
    #[derive(Clone)]
    enum Unknown {
        U(usize, usize, usize),
        V(usize, usize, usize),
        UScalar,
        VScalar,
    }
    let mut unknowns = Vec::new();
    if u_free {
        for mi in 0..mons.len() {
            for r in 0..m {
                for c in 0..m {
                    unknowns.push(Unknown::U(mi, r, c));
                }
            }
        }
    } else {
        unknowns.push(Unknown::UScalar);
    }
    if v_free {
        for mi in 0..mons.len() {
            for r in 0..n {
                for c in 0..n {
                    unknowns.push(Unknown::V(mi, r, c));
                }
            }
        }
    } else if kind != GroupKind::Conjugacy {
        unknowns.push(Unknown::VScalar);
    }
    // contribution of one unknown to U·A − B·V (conjugacy: V = U)
    let column = |u: &Unknown| -> SparseVec {
        let mut pairs = Vec::new();
        let mut left = |index: &MultiIndex, r: usize, c: usize| {
            // E_rc x^I · A: row r gets x^I · row c of A
            for col in 0..n {
                for (t, v) in a.entry(c, col).terms() {
                    if let Some(e) = eqs.index_of(&t.add(index), r, col) {
                        pairs.push((e, v.clone()));
                    }
                }
            }
        };
        let mut right_pairs = Vec::new();
        let mut right = |index: &MultiIndex, r: usize, c: usize| {
            // −B · E_rc x^I: column c gets −x^I · column r of B
            for row in 0..m {
                for (t, v) in b.entry(row, r).terms() {
                    if let Some(e) = eqs.index_of(&t.add(index), row, c) {
                        right_pairs.push((e, -v));
                    }
                }
            }
        };
        match u {
            Unknown::U(mi, r, c) => {
                left(&mons[*mi], *r, *c);
                if kind == GroupKind::Conjugacy {
                    right(&mons[*mi], *r, *c);
                }
            }
            Unknown::V(mi, r, c) => right(&mons[*mi], *r, *c),
            Unknown::UScalar => (0..m).for_each(|i| left(&zero, i, i)),
            Unknown::VScalar => (0..n).for_each(|i| right(&zero, i, i)),
        }
        pairs.extend(right_pairs);
        SparseVec::from_pairs(pairs)
    };
    let rows = eqs.dim();
    let mut e = Echelon::new(rows);
    let solutions: Vec<SparseVec> = unknowns
        .iter()
        .enumerate()
        .filter_map(|(k, u)| e.insert(&column(u).concat(SparseVec::unit(rows + k))))
        .map(|r| r.slice(rows, rows + unknowns.len()))
        .collect();
    if solutions.is_empty() {
        return Ok(None);
    }

    let build = |x: &SparseVec| -> (MatrixJet, MatrixJet) {
        let mut u = MatrixJet::zeros(m, m, p, j);
        let mut v = MatrixJet::zeros(n, n, p, j);
        for (k, c) in x.entries() {
            match &unknowns[*k] {
                Unknown::U(mi, r, col) => {
                    u.entry_mut(*r, *col).add_term(mons[*mi].clone(), c.clone());
                }
                Unknown::V(mi, r, col) => {
                    v.entry_mut(*r, *col).add_term(mons[*mi].clone(), c.clone());
                }
                Unknown::UScalar => (0..m).for_each(|i| {
                    u.entry_mut(i, i).add_term(zero.clone(), c.clone());
                }),
                Unknown::VScalar => (0..n).for_each(|i| {
                    v.entry_mut(i, i).add_term(zero.clone(), c.clone());
                }),
            }
        }
        if kind == GroupKind::Conjugacy {
            v = u.clone();
        }
        (u, v)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
    for attempt in 0..WITNESS_ATTEMPTS {
        let bound = 2 + i64::from(attempt);
        let x = if attempt == 0 && solutions.len() == 1 {
            solutions[0].clone()
        } else {
            solutions
                .iter()
                .fold(SparseVec::new(), |acc, s| acc.axpy(&Scalar::from_int(rng.gen_range(-bound..=bound)), s))
        };
        let (u, v) = build(&x);
        let (du, dv) = (u.constant_term().det()?, v.constant_term().det()?);
        if du.is_zero() || dv.is_zero() {
            continue;
        }
        // normalize a side that is a multiple of the identity to exactly 1
        let (u, v) = match kind {
            GroupKind::Left => {
                let c = v.constant_term().get(0, 0).inv().unwrap();
                (u.scale(&c), v.scale(&c))
            }
            GroupKind::Right => {
                let c = u.constant_term().get(0, 0).inv().unwrap();
                (u.scale(&c), v.scale(&c))
            }
            _ => (u, v),
        };
        let g = GroupElementJet::new(kind, u, v)?;
        debug_assert_eq!(g.act(&a)?, b);
        return Ok(Some(g));
    }
    Ok(None)
}

/// Diagonal form over `K[[x]]` in one variable with its witnesses.
#[derive(Clone, Debug)]
pub struct OneVariableForm {
    pub normal_form: MatrixJet,
    /// `U·A·V⁻¹ = B`.
    pub u: MatrixJet,
    pub v: MatrixJet,
    /// Orders of the diagonal entries, ascending; `None` where the entry is
    /// zero at this truncation.
    pub orders: Vec<Option<u32>>,
}

/// Valuation-driven elimination: `A ~ diag(x^{k_1}, …, x^{k_r}, 0, …)`.
pub fn one_variable_nf(a: &MatrixJet) -> Result<OneVariableForm> {
    if a.nvars() != 1 {
        return Err(Error::InvalidInput(format!("one-variable form needs p = 1, got p = {}", a.nvars())));
    }
    let (m, n, order) = (a.rows(), a.cols(), a.truncation());
    let mut w = a.clone();
    let mut left = MatrixJet::identity(m, 1, order);
    let mut right = MatrixJet::identity(n, 1, order);
    let mut orders = Vec::new();
    for t in 0..m.min(n) {
        let best = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| w.entry(i, j).valuation().map(|v| (v, i, j)))
            .min();
        let Some((k, pi, pj)) = best else { break };
        swap_rows(&mut w, t, pi);
        swap_rows(&mut left, t, pi);
        swap_cols(&mut w, t, pj);
        swap_cols(&mut right, t, pj);
        let xk = MultiIndex::new(vec![k]);
        let unit = w.entry(t, t).div_monomial(&xk).expect("valuation is k").with_truncation(order);
        let inv = unit.inverse()?;
        scale_row(&mut w, t, &inv);
        scale_row(&mut left, t, &inv);
        for i in t + 1..m {
            if let Some(q) = w.entry(i, t).div_monomial(&xk) {
                let q = q.with_truncation(order);
                if !q.is_zero() {
                    add_row_multiple(&mut w, i, t, &q.neg());
                    add_row_multiple(&mut left, i, t, &q.neg());
                }
            }
        }
        for j in t + 1..n {
            if let Some(q) = w.entry(t, j).div_monomial(&xk) {
                let q = q.with_truncation(order);
                if !q.is_zero() {
                    add_col_multiple(&mut w, j, t, &q.neg());
                    add_col_multiple(&mut right, j, t, &q.neg());
                }
            }
        }
        orders.push(Some(k));
    }
    orders.resize(m.min(n), None);
    Ok(OneVariableForm { normal_form: w, u: left, v: invert_jet(&right)?, orders })
}

fn swap_rows(a: &mut MatrixJet, i: usize, k: usize) {
    if i != k {
        for c in 0..a.cols() {
            let (x, y) = (a.entry(i, c).clone(), a.entry(k, c).clone());
            *a.entry_mut(i, c) = y;
            *a.entry_mut(k, c) = x;
        }
    }
}

fn swap_cols(a: &mut MatrixJet, j: usize, k: usize) {
    if j != k {
        for r in 0..a.rows() {
            let (x, y) = (a.entry(r, j).clone(), a.entry(r, k).clone());
            *a.entry_mut(r, j) = y;
            *a.entry_mut(r, k) = x;
        }
    }
}

fn scale_row(a: &mut MatrixJet, i: usize, s: &SeriesJet) {
    for c in 0..a.cols() {
        let v = a.entry(i, c).mul(s).expect("same space");
        *a.entry_mut(i, c) = v;
    }
}

/// row_i += s · row_k
fn add_row_multiple(a: &mut MatrixJet, i: usize, k: usize, s: &SeriesJet) {
    for c in 0..a.cols() {
        let v = a.entry(i, c).add(&a.entry(k, c).mul(s).expect("same space")).expect("same space");
        *a.entry_mut(i, c) = v;
    }
}

/// col_j += s · col_k
fn add_col_multiple(a: &mut MatrixJet, j: usize, k: usize, s: &SeriesJet) {
    for r in 0..a.rows() {
        let v = a.entry(r, j).add(&a.entry(r, k).mul(s).expect("same space")).expect("same space");
        *a.entry_mut(r, j) = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: usize, n: u32, e: &[u32], c: i64) -> SeriesJet {
        SeriesJet::monomial(p, n, MultiIndex::new(e.to_vec()), Scalar::from_int(c))
    }

    fn mat(rows: usize, cols: usize, entries: Vec<SeriesJet>) -> MatrixJet {
        MatrixJet::from_entries(rows, cols, entries).unwrap()
    }

    fn diag_xy(n: u32) -> MatrixJet {
        mat(2, 2, vec![s(2, n, &[1, 0], 1), SeriesJet::zero(2, n), SeriesJet::zero(2, n), s(2, n, &[0, 1], 1)])
    }

    #[test]
    fn two_sided_examples() {
        let n = 4;
        let a = mat(
            2,
            2,
            vec![s(2, n, &[1, 0], 1).add(&s(2, n, &[2, 0], 1)).unwrap(), SeriesJet::zero(2, n), SeriesJet::zero(2, n), s(2, n, &[0, 1], 1)],
        );
        let r = normal_form(&a, GroupKind::TwoSided, &NormalFormOptions::default()).unwrap();
        assert_eq!(r.normal_form, diag_xy(n));
        assert!(verify_certificate(&r).ok);

        let a = mat(2, 2, vec![s(2, n, &[1, 0], 1), s(2, n, &[0, 2], 1), SeriesJet::zero(2, n), s(2, n, &[0, 1], 1)]);
        let r = normal_form(&a, GroupKind::TwoSided, &NormalFormOptions::default()).unwrap();
        assert_eq!(r.normal_form, diag_xy(n));
        assert!(r.certificate.is_unipotent());
    }

    #[test]
    fn identity_constant_term_absorbs_everything() {
        let n = 3;
        let mut a = MatrixJet::identity(2, 2, n);
        a.set_entry(0, 1, s(2, n, &[1, 1], 3).add(&s(2, n, &[0, 1], -1)).unwrap()).unwrap();
        a.set_entry(1, 1, SeriesJet::constant(2, n, Scalar::one()).add(&s(2, n, &[2, 0], 5)).unwrap()).unwrap();
        for kind in [GroupKind::Left, GroupKind::Right, GroupKind::TwoSided] {
            let r = normal_form(&a, kind, &NormalFormOptions::default()).unwrap();
            assert_eq!(r.normal_form, MatrixJet::identity(2, 2, n), "{kind}");
        }
    }

    #[test]
    fn tampering_is_detected() {
        let n = 3;
        let a = mat(1, 1, vec![s(1, n, &[1], 1).add(&s(1, n, &[2], 4)).unwrap()]);
        let mut r = normal_form(&a, GroupKind::TwoSided, &NormalFormOptions::default()).unwrap();
        assert!(verify_certificate(&r).ok);
        let good = r.clone();
        r.normal_form = r.normal_form.add(&mat(1, 1, vec![s(1, n, &[3], 1)])).unwrap();
        let check = verify_certificate(&r);
        assert!(!check.ok);
        assert!(check.issues[0].contains("x1^3"), "{:?}", check.issues);
        let mut r = good;
        r.certificate = GroupElementJet::identity(GroupKind::TwoSided, 1, 1, 1, n);
        assert!(!verify_certificate(&r).ok);
    }

    #[test]
    fn pde_examples() {
        let n = 3;
        assert!(check_pde(&diag_xy(n), 1, GroupKind::TwoSided).unwrap().passed);
        let b = mat(2, 2, vec![s(2, n, &[1, 0], 1), s(2, n, &[0, 2], 1), SeriesJet::zero(2, n), s(2, n, &[0, 1], 1)]);
        let report = check_pde(&b, 1, GroupKind::TwoSided).unwrap();
        assert!(!report.passed);
        let fail = report.checks.iter().find(|c| !c.passed).unwrap();
        assert_eq!(fail.degree, 2);
        assert!(fail.first_nonzero.as_deref().unwrap().contains("(2, 2)") || fail.first_nonzero.is_some());

        // x·1 + y·J + [[γ0, 0], [γ1, γ0]] with γ0 = y², γ1 = −2xy
        let (x, y) = (s(2, n, &[1, 0], 1), s(2, n, &[0, 1], 1));
        let g0 = s(2, n, &[0, 2], 1);
        let g1 = s(2, n, &[1, 1], -2);
        let b = mat(2, 2, vec![x.add(&g0).unwrap(), y, g1, x.add(&g0).unwrap()]);
        assert!(check_pde(&b, 1, GroupKind::TwoSided).unwrap().passed);
    }

    #[test]
    fn conjugacy_needs_scalar_constant() {
        let a = MatrixJet::constant(
            &ConstMatrix::from_rows(vec![vec![Scalar::from_int(1), Scalar::from_int(0)], vec![Scalar::from_int(0), Scalar::from_int(2)]]).unwrap(),
            1,
            2,
        );
        assert!(matches!(check_pde(&a, 1, GroupKind::Conjugacy), Err(Error::InvalidInput(_))));
        let r = normal_form(&a, GroupKind::Conjugacy, &NormalFormOptions::default()).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn determinacy_examples() {
        let id = MatrixJet::identity(2, 1, 4);
        let lim = Limits::default();
        let r = determinacy_report(&id, GroupKind::TwoSided, 0, 4, &lim).unwrap();
        assert_eq!(r.first_failure, None);
        let r = determinacy_report(&id, GroupKind::Conjugacy, 0, 4, &lim).unwrap();
        assert_eq!(r.first_failure, Some(1));
        assert!(r.degrees.iter().all(|d| !d.contained && d.trace_obstruction));
        let z = MatrixJet::zeros(2, 2, 1, 3);
        for kind in GroupKind::ALL {
            let r = determinacy_report(&z, kind, 0, 3, &lim).unwrap();
            assert!(r.degrees.iter().all(|d| !d.contained));
        }
        let rank1 = MatrixJet::constant(
            &ConstMatrix::from_rows(vec![vec![Scalar::from_int(1), Scalar::from_int(0)], vec![Scalar::from_int(0), Scalar::from_int(0)]]).unwrap(),
            1,
            2,
        );
        let r = determinacy_report(&rank1, GroupKind::Left, 0, 2, &lim).unwrap();
        assert_eq!(r.first_failure, Some(1));
    }

    #[test]
    fn equivalence_examples() {
        let n = 3;
        let a = mat(2, 2, vec![s(2, n, &[1, 0], 1), s(2, n, &[0, 2], 1), SeriesJet::zero(2, n), s(2, n, &[0, 1], 1)]);
        let b = diag_xy(n);
        let g = jet_equivalence(&a, &b, GroupKind::TwoSided, 3).unwrap().unwrap();
        assert_eq!(g.act(&a.truncate(3)).unwrap(), b.truncate(3));
        let id = jet_equivalence(&a, &a, GroupKind::Left, 2).unwrap().unwrap();
        assert_eq!(id, GroupElementJet::identity(GroupKind::Left, 2, 2, 2, 2));
        let x = mat(1, 1, vec![s(1, n, &[1], 1)]);
        let x2 = mat(1, 1, vec![s(1, n, &[2], 1)]);
        assert!(jet_equivalence(&x, &x2, GroupKind::TwoSided, 2).unwrap().is_none());
        assert!(matches!(jet_equivalence(&x, &x, GroupKind::Congruence, 1), Err(Error::Unsupported(_))));
        for kind in [GroupKind::Left, GroupKind::Right, GroupKind::Conjugacy] {
            let g = jet_equivalence(&a, &b, kind, 2).unwrap();
            if let Some(g) = g {
                assert_eq!(g.act(&a.truncate(2)).unwrap(), b.truncate(2), "{kind}");
            }
        }
    }

    #[test]
    fn one_variable_examples() {
        let n = 5;
        let a = mat(2, 2, vec![s(1, n, &[2], 1), SeriesJet::zero(1, n), SeriesJet::zero(1, n), s(1, n, &[1], 1)]);
        let r = one_variable_nf(&a).unwrap();
        let expect = mat(2, 2, vec![s(1, n, &[1], 1), SeriesJet::zero(1, n), SeriesJet::zero(1, n), s(1, n, &[2], 1)]);
        assert_eq!(r.normal_form, expect);
        assert_eq!(r.orders, vec![Some(1), Some(2)]);
        let check = |r: &OneVariableForm, a: &MatrixJet| {
            let g = GroupElementJet::new(GroupKind::TwoSided, r.u.clone(), r.v.clone()).unwrap();
            assert_eq!(g.act(a).unwrap(), r.normal_form);
        };
        check(&r, &a);
        let x = s(1, n, &[1], 1);
        let a = mat(2, 2, vec![x.clone(), x.clone(), x.clone(), x.clone()]);
        let r = one_variable_nf(&a).unwrap();
        assert_eq!(r.normal_form, mat(2, 2, vec![x, SeriesJet::zero(1, n), SeriesJet::zero(1, n), SeriesJet::zero(1, n)]));
        assert_eq!(r.orders, vec![Some(1), None]);
        check(&r, &a);
        let z = MatrixJet::zeros(2, 3, 1, n);
        assert_eq!(one_variable_nf(&z).unwrap().normal_form, z);
    }

    #[test]
    fn full_g_preprocessing() {
        let n = 2;
        let c = ConstMatrix::from_rows(vec![vec![Scalar::from_int(2), Scalar::from_int(4)], vec![Scalar::from_int(1), Scalar::from_int(2)]]).unwrap();
        let a = MatrixJet::constant(&c, 1, n).add(&mat(2, 2, vec![s(1, n, &[1], 1), SeriesJet::zero(1, n), SeriesJet::zero(1, n), s(1, n, &[1], 3)])).unwrap();
        for kind in [GroupKind::Left, GroupKind::Right, GroupKind::TwoSided] {
            let opts = NormalFormOptions { full_g: true, ..Default::default() };
            let r = normal_form(&a, kind, &opts).unwrap();
            assert!(verify_certificate(&r).ok, "{kind}");
            assert_eq!(r.full_certificate().unwrap().act(&a).unwrap(), r.normal_form);
        }
        let opts = NormalFormOptions { full_g: true, ..Default::default() };
        let r = normal_form(&a, GroupKind::TwoSided, &opts).unwrap();
        let expect = ConstMatrix::from_rows(vec![vec![Scalar::from_int(1), Scalar::from_int(0)], vec![Scalar::from_int(0), Scalar::from_int(0)]]).unwrap();
        assert_eq!(r.normal_form.constant_term(), expect);
        assert!(normal_form(&MatrixJet::identity(2, 1, 2), GroupKind::Conjugacy, &opts).is_err());
    }
}
