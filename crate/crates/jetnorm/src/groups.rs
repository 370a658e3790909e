//! The five transformation groups, their Lie algebras and actions on jets.
//!
//! Every group element is stored as a pair `(U, V)` acting by
//! `A ↦ U·A·V⁻¹`, so composition is always `(U₁U₂, V₁V₂)` and the exponential
//! of a Lie pair is `(exp ν_l, exp ν_r)`. The kinds differ in which pairs are
//! allowed:
//!
//! | kind        | element            | Lie constraint     |
//! |-------------|--------------------|--------------------|
//! | `Left`      | `(U, 1)`           | `ν_r = 0`          |
//! | `Right`     | `(1, V)`           | `ν_l = 0`          |
//! | `TwoSided`  | `(U, V)`           | none               |
//! | `Conjugacy` | `(U, U)`           | `ν_r = ν_l`        |
//! | `Congruence`| `(U, (Uᵀ)⁻¹)`      | `ν_r = −ν_lᵀ`      |
//!
//! Congruence therefore acts by `U·A·Uᵀ`, and its infinitesimal action is
//! `ν_l·A + A·ν_lᵀ`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dense::ConstMatrix;
use crate::error::{Error, Result};
use crate::jets::{IntMatrixJet, JetPair, MatrixJet, MatrixJetJson};
use crate::scalars::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    Left,
    Right,
    #[default]
    TwoSided,
    Conjugacy,
    Congruence,
}

impl GroupKind {
    pub const ALL: [GroupKind; 5] =
        [GroupKind::Left, GroupKind::Right, GroupKind::TwoSided, GroupKind::Conjugacy, GroupKind::Congruence];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupKind::Left => "left",
            GroupKind::Right => "right",
            GroupKind::TwoSided => "two-sided",
            GroupKind::Conjugacy => "conjugacy",
            GroupKind::Congruence => "congruence",
        }
    }

    /// Conjugacy and congruence need square matrices.
    pub fn check_shape(self, rows: usize, cols: usize) -> Result<()> {
        if matches!(self, GroupKind::Conjugacy | GroupKind::Congruence) && rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        Ok(())
    }

    /// Whether the Lie algebra ties `ν_r` to `ν_l`.
    pub fn is_coupled(self) -> bool {
        matches!(self, GroupKind::Conjugacy | GroupKind::Congruence)
    }

    pub fn uses_left(self) -> bool {
        self != GroupKind::Right
    }

    pub fn uses_right(self) -> bool {
        self != GroupKind::Left
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "left" | "l" => Ok(GroupKind::Left),
            "right" | "r" => Ok(GroupKind::Right),
            "two-sided" | "twosided" | "lr" | "both" => Ok(GroupKind::TwoSided),
            "conjugacy" | "conjugation" | "c" => Ok(GroupKind::Conjugacy),
            "congruence" | "t" => Ok(GroupKind::Congruence),
            other => Err(Error::InvalidInput(format!(
                "unknown group '{other}' (expected left, right, two-sided, conjugacy or congruence)"
            ))),
        }
    }
}

/// Inverse of a square jet, by back-substitution degree by degree.
pub fn invert_jet(u: &MatrixJet) -> Result<MatrixJet> {
    if !u.is_square() {
        return Err(Error::NotSquare { rows: u.rows(), cols: u.cols() });
    }
    let (n, p, order) = (u.rows(), u.nvars(), u.truncation());
    let w0 = MatrixJet::constant(&u.constant_term().inverse()?, p, order);
    let parts: Vec<MatrixJet> = (0..=order).map(|d| u.homogeneous(d)).collect::<Result<_>>()?;
    // W_d = −W_0 Σ_{k=1..d} U_k W_{d−k}
    let mut w = vec![w0.clone()];
    for d in 1..=order as usize {
        let mut acc = MatrixJet::zeros(n, n, p, order);
        for k in 1..=d {
            if !parts[k].is_zero() && !w[d - k].is_zero() {
                acc = acc.add(&parts[k].mul(&w[d - k])?)?;
            }
        }
        w.push(w0.mul(&acc)?.neg().homogeneous(d as u32)?);
    }
    w.iter().try_fold(MatrixJet::zeros(n, n, p, order), |acc, part| acc.add(part))
}

/// `Σ_{i≤N} λ^i/i!`; requires `π_0 λ = 0`.
pub fn exp_jet(lambda: &MatrixJet) -> Result<MatrixJet> {
    if !lambda.is_square() {
        return Err(Error::NotSquare { rows: lambda.rows(), cols: lambda.cols() });
    }
    if !lambda.constant_term().is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let mut out = MatrixJet::identity(lambda.rows(), lambda.nvars(), lambda.truncation());
    let mut term = out.clone();
    for i in 1..=lambda.truncation() {
        term = term.mul(lambda)?.scale(&Scalar::ratio(1, i as i64));
        if term.is_zero() {
            break;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// `(exp λ, exp −λ)`. With `λ = L/d` over integers, both are
/// `Σ_k (±1)^k L^k d^{K−k} K!/k!` over `d^K K!`, so the sums need no gcds.
fn exp_both(lambda: &MatrixJet) -> Result<(MatrixJet, MatrixJet)> {
    if !lambda.is_square() {
        return Err(Error::NotSquare { rows: lambda.rows(), cols: lambda.cols() });
    }
    if !lambda.constant_term().is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let l = IntMatrixJet::from_jet(lambda);
    let d = l.denominator()[0].clone();
    let mut powers = vec![IntMatrixJet::identity(lambda.rows(), lambda.nvars(), lambda.truncation())];
    for _ in 1..=lambda.truncation() {
        let next = powers.last().expect("nonempty").mul(&l);
        if next.is_zero() {
            break;
        }
        powers.push(next);
    }
    let top = powers.len() - 1;
    let mut plus = l.zeros_like();
    let mut minus = l.zeros_like();
    // c_k = d^{K−k} K!/k!, built from k = K downwards
    let mut c = BigInt::one();
    for (k, p) in powers.iter().enumerate().rev() {
        plus.add_scaled_numerators(&c, p);
        minus.add_scaled_numerators(&if k % 2 == 0 { c.clone() } else { -&c }, p);
        if k > 0 {
            c = c * &d * k;
        }
    }
    let mut den = vec![d; top];
    den.push((1..=top).fold(BigInt::one(), |f, i| f * i));
    Ok((plus.with_denominator(den.clone()).to_jet(), minus.with_denominator(den).to_jet()))
}

/// `Σ_{i≥1} (−1)^{i−1} u^i / i` with `u = U − 1`; requires `U_0 = 1`.
pub fn log_jet(unipotent: &MatrixJet) -> Result<MatrixJet> {
    if !unipotent.is_square() {
        return Err(Error::NotSquare { rows: unipotent.rows(), cols: unipotent.cols() });
    }
    if !unipotent.constant_term().is_identity() {
        return Err(Error::NotUnipotent);
    }
    let id = MatrixJet::identity(unipotent.rows(), unipotent.nvars(), unipotent.truncation());
    let u = unipotent.sub(&id)?;
    let mut out = MatrixJet::zeros(u.rows(), u.cols(), u.nvars(), u.truncation());
    let mut power = id;
    for i in 1..=u.truncation() {
        power = power.mul(&u)?;
        if power.is_zero() {
            break;
        }
        let sign = if i % 2 == 1 { 1 } else { -1 };
        out = out.add(&power.scale(&Scalar::ratio(sign, i as i64)))?;
    }
    Ok(out)
}

/// A Lie algebra element `ν = (ν_l, ν_r)` with vanishing constant terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieElementJet {
    kind: GroupKind,
    pair: JetPair,
}

impl LieElementJet {
    /// Validates the constant terms and the kind's constraint.
    pub fn new(kind: GroupKind, left: MatrixJet, right: MatrixJet) -> Result<Self> {
        if !left.is_square() || !right.is_square() {
            return Err(Error::ShapeMismatch("Lie components must be square".into()));
        }
        kind.check_shape(left.rows(), right.rows())?;
        if !left.constant_term().is_zero() || !right.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let ok = match kind {
            GroupKind::Left => right.is_zero(),
            GroupKind::Right => left.is_zero(),
            GroupKind::TwoSided => true,
            GroupKind::Conjugacy => right == left,
            GroupKind::Congruence => right == left.transpose().neg(),
        };
        if !ok {
            return Err(Error::ConstraintViolation(format!("pair is not in the {kind} Lie algebra")));
        }
        Ok(LieElementJet { kind, pair: JetPair { left, right } })
    }

    pub(crate) fn new_unchecked(kind: GroupKind, pair: JetPair) -> Self {
        LieElementJet { kind, pair }
    }

    pub fn zero(kind: GroupKind, m: usize, n: usize, nvars: usize, truncation: u32) -> Self {
        LieElementJet { kind, pair: JetPair::zeros(m, n, nvars, truncation) }
    }

    /// Builds from `ν_l` alone for kinds where it determines `ν_r`.
    pub fn from_left(kind: GroupKind, left: MatrixJet) -> Result<Self> {
        let right = match kind {
            GroupKind::Left => MatrixJet::zeros(left.rows(), left.rows(), left.nvars(), left.truncation()),
            GroupKind::Conjugacy => left.clone(),
            GroupKind::Congruence => left.transpose().neg(),
            _ => return Err(Error::InvalidInput(format!("{kind} elements need both components"))),
        };
        Self::new(kind, left, right)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn left(&self) -> &MatrixJet {
        &self.pair.left
    }

    pub fn right(&self) -> &MatrixJet {
        &self.pair.right
    }

    pub fn pair(&self) -> &JetPair {
        &self.pair
    }

    pub fn is_zero(&self) -> bool {
        self.pair.is_zero()
    }

    pub fn add(&self, other: &LieElementJet) -> Result<LieElementJet> {
        Ok(LieElementJet { kind: self.kind, pair: self.pair.add(&other.pair)? })
    }

    pub fn scale(&self, s: &Scalar) -> LieElementJet {
        LieElementJet { kind: self.kind, pair: self.pair.scale(s) }
    }

    pub fn neg(&self) -> LieElementJet {
        LieElementJet { kind: self.kind, pair: self.pair.neg() }
    }

    pub fn project(&self, j: u32) -> Result<LieElementJet> {
        Ok(LieElementJet { kind: self.kind, pair: self.pair.project(j)? })
    }

    /// Pair inner product `⟨ν_l, μ_l⟩ + ⟨ν_r, μ_r⟩`.
    pub fn inner_product(&self, other: &LieElementJet) -> Result<Scalar> {
        self.pair.inner_product(&other.pair)
    }

    /// `exp ν` as a group element.
    pub fn exp(&self) -> Result<GroupElementJet> {
        Ok(GroupElementJet { kind: self.kind, u: exp_jet(&self.pair.left)?, v: exp_jet(&self.pair.right)? })
    }

    /// `(exp ν, exp −ν)` from one pass over the powers of `ν`.
    pub(crate) fn exp_pair(&self) -> Result<(GroupElementJet, GroupElementJet)> {
        let (u, u_inv) = exp_both(&self.pair.left)?;
        let (v, v_inv) = exp_both(&self.pair.right)?;
        Ok((GroupElementJet { kind: self.kind, u, v }, GroupElementJet { kind: self.kind, u: u_inv, v: v_inv }))
    }

}

/// `νA = ν_l·A − A·ν_r`, truncated.
pub fn lie_act(nu: &LieElementJet, a: &MatrixJet) -> Result<MatrixJet> {
    nu.left().mul(a)?.sub(&a.mul(nu.right())?)
}

/// Orthogonal projection of an arbitrary pair onto the kind's Lie algebra.
pub fn delta_project(pair: &JetPair, kind: GroupKind) -> Result<LieElementJet> {
    let strip = |m: &MatrixJet| -> Result<MatrixJet> { m.sub(&m.project(0)?) };
    let half = Scalar::ratio(1, 2);
    let (l, r) = (&pair.left, &pair.right);
    let (left, right) = match kind {
        GroupKind::TwoSided => (strip(l)?, strip(r)?),
        GroupKind::Left => (strip(l)?, r.scale(&Scalar::zero())),
        GroupKind::Right => (l.scale(&Scalar::zero()), strip(r)?),
        GroupKind::Conjugacy => {
            let s = strip(&l.add(r)?.scale(&half))?;
            (s.clone(), s)
        }
        GroupKind::Congruence => {
            (strip(&l.sub(&r.transpose())?.scale(&half))?, strip(&r.sub(&l.transpose())?.scale(&half))?)
        }
    };
    LieElementJet::new(kind, left, right)
}

/// A group element `(U, V)` acting by `A ↦ U·A·V⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElementJet {
    kind: GroupKind,
    u: MatrixJet,
    v: MatrixJet,
}

impl GroupElementJet {
    pub fn identity(kind: GroupKind, m: usize, n: usize, nvars: usize, truncation: u32) -> Self {
        GroupElementJet {
            kind,
            u: MatrixJet::identity(m, nvars, truncation),
            v: MatrixJet::identity(n, nvars, truncation),
        }
    }

    /// Validates invertibility and the kind's constraint.
    pub fn new(kind: GroupKind, u: MatrixJet, v: MatrixJet) -> Result<Self> {
        if !u.is_square() || !v.is_square() {
            return Err(Error::ShapeMismatch("group components must be square".into()));
        }
        kind.check_shape(u.rows(), v.rows())?;
        if u.constant_term().det()?.is_zero() || v.constant_term().det()?.is_zero() {
            return Err(Error::SingularConstantTerm);
        }
        let ok = match kind {
            GroupKind::Left => v == MatrixJet::identity(v.rows(), v.nvars(), v.truncation()),
            GroupKind::Right => u == MatrixJet::identity(u.rows(), u.nvars(), u.truncation()),
            GroupKind::TwoSided => true,
            GroupKind::Conjugacy => u == v,
            GroupKind::Congruence => {
                v.mul(&u.transpose())? == MatrixJet::identity(u.rows(), u.nvars(), u.truncation())
            }
        };
        if !ok {
            return Err(Error::ConstraintViolation(format!("pair is not in the {kind} group")));
        }
        Ok(GroupElementJet { kind, u, v })
    }

    /// Builds from `U` alone for the kinds where `U` determines the element.
    pub fn from_u(kind: GroupKind, u: MatrixJet) -> Result<Self> {
        let v = match kind {
            GroupKind::Left => MatrixJet::identity(u.rows(), u.nvars(), u.truncation()),
            GroupKind::Conjugacy => u.clone(),
            GroupKind::Congruence => invert_jet(&u.transpose())?,
            _ => return Err(Error::InvalidInput(format!("{kind} elements need both components"))),
        };
        Self::new(kind, u, v)
    }

    /// Builds a `Right` element from `V`.
    pub fn from_v(v: MatrixJet) -> Result<Self> {
        let u = MatrixJet::identity(v.rows(), v.nvars(), v.truncation());
        Self::new(GroupKind::Right, u, v)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn u(&self) -> &MatrixJet {
        &self.u
    }

    pub fn v(&self) -> &MatrixJet {
        &self.v
    }

    pub fn truncation(&self) -> u32 {
        self.u.truncation()
    }

    /// `π_0 U = 1` and `π_0 V = 1`.
    pub fn is_unipotent(&self) -> bool {
        self.u.constant_term().is_identity() && self.v.constant_term().is_identity()
    }

    /// `self ∘ other`: acting by `other` first.
    pub fn compose(&self, other: &GroupElementJet) -> Result<GroupElementJet> {
        if self.kind != other.kind {
            return Err(Error::InvalidInput(format!("cannot compose {} with {}", self.kind, other.kind)));
        }
        Ok(GroupElementJet { kind: self.kind, u: self.u.mul(&other.u)?, v: self.v.mul(&other.v)? })
    }

    pub fn inverse(&self) -> Result<GroupElementJet> {
        Ok(GroupElementJet { kind: self.kind, u: invert_jet(&self.u)?, v: invert_jet(&self.v)? })
    }

    /// `π_j g`
    pub fn project(&self, j: u32) -> Result<GroupElementJet> {
        Ok(GroupElementJet { kind: self.kind, u: self.u.project(j)?, v: self.v.project(j)? })
    }

    /// Logarithm of a unipotent element.
    pub fn log(&self) -> Result<LieElementJet> {
        let pair = JetPair { left: log_jet(&self.u)?, right: log_jet(&self.v)? };
        Ok(LieElementJet::new_unchecked(self.kind, pair))
    }

    /// `g.A`
    pub fn act(&self, a: &MatrixJet) -> Result<MatrixJet> {
        self.kind.check_shape(a.rows(), a.cols())?;
        if self.u.rows() != a.rows() || self.v.rows() != a.cols() {
            return Err(Error::ShapeMismatch(format!(
                "group element for {}x{} matrices applied to a {}x{} matrix",
                self.u.rows(),
                self.v.rows(),
                a.rows(),
                a.cols()
            )));
        }
        match self.kind {
            GroupKind::Left => self.u.mul(a),
            GroupKind::Right => a.mul(&invert_jet(&self.v)?),
            GroupKind::TwoSided => self.u.mul(a)?.mul(&invert_jet(&self.v)?),
            GroupKind::Conjugacy => self.u.mul(a)?.mul(&invert_jet(&self.u)?),
            GroupKind::Congruence => self.u.mul(a)?.mul(&self.u.transpose()),
        }
    }

    /// `g.A` given `g⁻¹`, which spares the series inversion.
    pub(crate) fn act_with_inverse(&self, inv: &GroupElementJet, a: &MatrixJet) -> Result<MatrixJet> {
        match self.kind {
            GroupKind::Left => self.u.mul(a),
            GroupKind::Right => a.mul(&inv.v),
            GroupKind::TwoSided => self.u.mul(a)?.mul(&inv.v),
            GroupKind::Conjugacy => self.u.mul(a)?.mul(&inv.u),
            GroupKind::Congruence => self.u.mul(a)?.mul(&self.u.transpose()),
        }
    }


    pub fn to_json(&self) -> GroupElementJson {
        GroupElementJson {
            kind: self.kind,
            u: (self.kind != GroupKind::Right).then(|| self.u.to_json()),
            v: matches!(self.kind, GroupKind::Right | GroupKind::TwoSided).then(|| self.v.to_json()),
        }
    }

    pub fn from_json(j: &GroupElementJson) -> Result<Self> {
        let missing = |what: &str| Error::InvalidInput(format!("{} element is missing {what}", j.kind));
        match j.kind {
            GroupKind::Right => Self::from_v(MatrixJet::from_json(j.v.as_ref().ok_or_else(|| missing("V"))?)?),
            GroupKind::TwoSided => Self::new(
                j.kind,
                MatrixJet::from_json(j.u.as_ref().ok_or_else(|| missing("U"))?)?,
                MatrixJet::from_json(j.v.as_ref().ok_or_else(|| missing("V"))?)?,
            ),
            _ => Self::from_u(j.kind, MatrixJet::from_json(j.u.as_ref().ok_or_else(|| missing("U"))?)?),
        }
    }
}

/// JSON form `{kind, U, V}`; a component fixed by the kind is omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElementJson {
    pub kind: GroupKind,
    #[serde(rename = "U", skip_serializing_if = "Option::is_none", default)]
    pub u: Option<MatrixJetJson>,
    #[serde(rename = "V", skip_serializing_if = "Option::is_none", default)]
    pub v: Option<MatrixJetJson>,
}

/// Constant matrix as a group element for kinds where that makes sense.
pub fn constant_element(kind: GroupKind, u: &ConstMatrix, v: &ConstMatrix, nvars: usize, truncation: u32) -> Result<GroupElementJet> {
    GroupElementJet::new(kind, MatrixJet::constant(u, nvars, truncation), MatrixJet::constant(v, nvars, truncation))
}


#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::jets::{MultiIndex, SeriesJet};
    use proptest::prelude::*;

    fn mono(p: usize, n: u32, e: &[u32], c: Scalar) -> SeriesJet {
        SeriesJet::monomial(p, n, MultiIndex::new(e.to_vec()), c)
    }

    fn one_by_one(s: SeriesJet) -> MatrixJet {
        MatrixJet::from_entries(1, 1, vec![s]).unwrap()
    }

    fn poly1(n: u32, coeffs: &[(u32, Scalar)]) -> MatrixJet {
        let s = coeffs.iter().fold(SeriesJet::zero(1, n), |acc, (d, c)| acc.add(&mono(1, n, &[*d], c.clone())).unwrap());
        one_by_one(s)
    }

    #[test]
    fn inversion_examples() {
        let id = MatrixJet::identity(2, 2, 3);
        assert_eq!(invert_jet(&id).unwrap(), id);
        let u = poly1(3, &[(0, Scalar::one()), (1, Scalar::one())]);
        let expect = poly1(3, &[(0, 1.into()), (1, (-1).into()), (2, 1.into()), (3, (-1).into())]);
        assert_eq!(invert_jet(&u).unwrap(), expect);
        assert_eq!(invert_jet(&poly1(3, &[(1, Scalar::one())])), Err(Error::SingularConstantTerm));
    }

    #[test]
    fn exp_log_examples() {
        let zero = MatrixJet::zeros(2, 2, 1, 3);
        assert_eq!(exp_jet(&zero).unwrap(), MatrixJet::identity(2, 1, 3));
        let mut nil = MatrixJet::zeros(2, 2, 1, 3);
        nil.set_entry(0, 1, SeriesJet::variable(1, 3, 0)).unwrap();
        assert_eq!(exp_jet(&nil).unwrap(), MatrixJet::identity(2, 1, 3).add(&nil).unwrap());
        let x = poly1(3, &[(1, Scalar::one())]);
        let expect = poly1(3, &[(0, 1.into()), (1, 1.into()), (2, Scalar::ratio(1, 2)), (3, Scalar::ratio(1, 6))]);
        assert_eq!(exp_jet(&x).unwrap(), expect);
        assert_eq!(exp_jet(&poly1(3, &[(0, 1.into())])), Err(Error::NonzeroConstantTerm));

        assert!(log_jet(&MatrixJet::identity(2, 1, 3)).unwrap().is_zero());
        let one_plus_x = poly1(3, &[(0, 1.into()), (1, 1.into())]);
        let expect = poly1(3, &[(1, 1.into()), (2, Scalar::ratio(-1, 2)), (3, Scalar::ratio(1, 3))]);
        assert_eq!(log_jet(&one_plus_x).unwrap(), expect);
        assert_eq!(log_jet(&poly1(3, &[(0, 2.into())])), Err(Error::NotUnipotent));
    }

    #[test]
    fn left_action_example() {
        // U = [[1,−y],[0,1]] on [[x,y²],[0,y]]
        let (p, n) = (2, 3);
        let x = SeriesJet::variable(p, n, 0);
        let y = SeriesJet::variable(p, n, 1);
        let one = SeriesJet::constant(p, n, Scalar::one());
        let zero = SeriesJet::zero(p, n);
        let u = MatrixJet::from_entries(2, 2, vec![one.clone(), y.neg(), zero.clone(), one]).unwrap();
        let a = MatrixJet::from_entries(2, 2, vec![x.clone(), y.mul(&y).unwrap(), zero.clone(), y.clone()]).unwrap();
        let g = GroupElementJet::from_u(GroupKind::Left, u).unwrap();
        let b = MatrixJet::from_entries(2, 2, vec![x, zero.clone(), zero, y]).unwrap();
        assert_eq!(g.act(&a).unwrap(), b);
        let id = GroupElementJet::identity(GroupKind::TwoSided, 2, 2, p, n);
        assert_eq!(id.act(&a).unwrap(), a);
    }

    #[test]
    fn lie_act_examples() {
        let x = poly1(3, &[(1, 1.into())]);
        let nu = LieElementJet::new(GroupKind::TwoSided, x.scale(&Scalar::from_int(3)), x.scale(&Scalar::from_int(5)))
            .unwrap();
        assert_eq!(lie_act(&nu, &x).unwrap(), poly1(3, &[(2, (-2).into())]));
        let c = LieElementJet::from_left(GroupKind::Conjugacy, x.clone()).unwrap();
        assert!(lie_act(&c, &poly1(3, &[(0, 4.into()), (2, 1.into())])).unwrap().is_zero());
        let z = LieElementJet::zero(GroupKind::TwoSided, 1, 1, 1, 3);
        assert!(lie_act(&z, &x).unwrap().is_zero());
    }

    #[test]
    fn delta_project_examples() {
        let (p, n) = (1, 2);
        let x = SeriesJet::variable(p, n, 0);
        let one = SeriesJet::constant(p, n, Scalar::one());
        let l = MatrixJet::from_entries(2, 2, vec![x.clone(), one.clone(), x.mul(&x).unwrap(), SeriesJet::zero(p, n)]).unwrap();
        let r = MatrixJet::from_entries(2, 2, vec![one.clone(), x.clone(), x.clone(), x.clone()]).unwrap();
        let pair = JetPair { left: l.clone(), right: r.clone() };
        let left = delta_project(&pair, GroupKind::Left).unwrap();
        assert_eq!(left.left(), &l.sub(&l.project(0).unwrap()).unwrap());
        assert!(left.right().is_zero());
        let only_l = JetPair { left: l.clone(), right: MatrixJet::zeros(2, 2, p, n) };
        let cong = delta_project(&only_l, GroupKind::Congruence).unwrap();
        assert_eq!(cong.right(), &cong.left().transpose().neg());
        for kind in GroupKind::ALL {
            let d = delta_project(&pair, kind).unwrap();
            assert_eq!(delta_project(d.pair(), kind).unwrap(), d);
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in GroupKind::ALL {
            assert_eq!(kind.as_str().parse::<GroupKind>().unwrap(), kind);
        }
        assert!("sideways".parse::<GroupKind>().is_err());
    }

    fn exp_scaled(lambda: &MatrixJet, t: &Scalar) -> MatrixJet {
        exp_jet(&lambda.scale(t)).unwrap()
    }

    pub(crate) fn arb_nilpotent(n: usize, p: usize, order: u32) -> impl Strategy<Value = MatrixJet> {
        crate::jets::tests::arb_matrix(n, n, p, order).prop_map(|m| m.sub(&m.project(0).unwrap()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exp_log_laws(l in arb_nilpotent(2, 2, 3), s in -3i64..=3, t in -3i64..=3) {
            let e = exp_jet(&l).unwrap();
            prop_assert_eq!(e.mul(&exp_jet(&l.neg()).unwrap()).unwrap(), MatrixJet::identity(2, 2, 3));
            prop_assert_eq!(log_jet(&e).unwrap(), l.clone());
            prop_assert_eq!(exp_jet(&log_jet(&e).unwrap()).unwrap(), e.clone());
            let (s, t) = (Scalar::ratio(s, 2), Scalar::ratio(t, 3));
            let lhs = exp_scaled(&l, &(&s + &t));
            let rhs = exp_scaled(&l, &s).mul(&exp_scaled(&l, &t)).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(e.mul(&invert_jet(&e).unwrap()).unwrap(), MatrixJet::identity(2, 2, 3));
        }

        #[test]
        fn paired_exponentials_match_the_series(
            l in arb_nilpotent(2, 2, 3), r in arb_nilpotent(2, 2, 3),
            a in crate::jets::tests::arb_matrix(2, 2, 2, 3),
        ) {
            for kind in GroupKind::ALL {
                let nu = delta_project(&JetPair { left: l.clone(), right: r.clone() }, kind).unwrap();
                let (g, back) = nu.exp_pair().unwrap();
                prop_assert_eq!(&g, &nu.exp().unwrap());
                prop_assert_eq!(&back, &nu.neg().exp().unwrap());
                prop_assert_eq!(g.act_with_inverse(&back, &a).unwrap(), g.act(&a).unwrap());
            }
        }

        #[test]
        fn action_is_a_group_action(
            l1 in arb_nilpotent(2, 2, 3), r1 in arb_nilpotent(2, 2, 3),
            l2 in arb_nilpotent(2, 2, 3), r2 in arb_nilpotent(2, 2, 3),
            a in crate::jets::tests::arb_matrix(2, 2, 2, 3),
        ) {
            for kind in GroupKind::ALL {
                let pair1 = JetPair { left: l1.clone(), right: r1.clone() };
                let pair2 = JetPair { left: l2.clone(), right: r2.clone() };
                let g1 = delta_project(&pair1, kind).unwrap().exp().unwrap();
                let g2 = delta_project(&pair2, kind).unwrap().exp().unwrap();
                // exp lands in the group
                let rebuilt = GroupElementJet::new(kind, g1.u().clone(), g1.v().clone());
                prop_assert!(rebuilt.is_ok(), "{kind}: {:?}", rebuilt);
                let lhs = g1.compose(&g2).unwrap().act(&a).unwrap();
                let rhs = g1.act(&g2.act(&a).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
                prop_assert_eq!(g1.inverse().unwrap().act(&g1.act(&a).unwrap()).unwrap(), a.clone());
                for j in 0..=3 {
                    let lhs = g1.act(&a).unwrap().project(j).unwrap();
                    let gj = g1.project(j).unwrap();
                    let rhs = gj.act(&a.project(j).unwrap()).unwrap().project(j).unwrap();
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }

        #[test]
        fn linearization_matches_first_order(
            l in arb_nilpotent(2, 1, 4), r in arb_nilpotent(2, 1, 4),
            a in crate::jets::tests::arb_matrix(2, 2, 1, 4),
        ) {
            // replace ν by tν: act(exp(tν)) − A − t·νA is O(t²); check the t-polynomial
            // at three values so that its linear coefficient is isolated exactly
            for kind in GroupKind::ALL {
                let nu = delta_project(&JetPair { left: l.clone(), right: r.clone() }, kind).unwrap();
                let f = |t: i64| -> MatrixJet {
                    let g = nu.scale(&Scalar::from_int(t)).exp().unwrap();
                    g.act(&a).unwrap()
                };
                // f(t) = A + tX + t²Y + …; with N=4 and order(ν)≥1 the series in t stops at t^4
                let (f1, fm1, f2, fm2) = (f(1), f(-1), f(2), f(-2));
                // X = (8(f1−f−1) − (f2−f−2)) / 12 (exact for polynomials of degree ≤ 4)
                let x = f1.sub(&fm1).unwrap().scale(&Scalar::from_int(8))
                    .sub(&f2.sub(&fm2).unwrap()).unwrap()
                    .scale(&Scalar::ratio(1, 12));
                prop_assert_eq!(x, lie_act(&nu, &a).unwrap());
            }
        }

        #[test]
        fn delta_project_is_self_adjoint(
            l1 in crate::jets::tests::arb_matrix(2, 2, 1, 2), r1 in crate::jets::tests::arb_matrix(2, 2, 1, 2),
            l2 in crate::jets::tests::arb_matrix(2, 2, 1, 2), r2 in crate::jets::tests::arb_matrix(2, 2, 1, 2),
        ) {
            let a = JetPair { left: l1, right: r1 };
            let b = JetPair { left: l2, right: r2 };
            for kind in GroupKind::ALL {
                let pa = delta_project(&a, kind).unwrap();
                let pb = delta_project(&b, kind).unwrap();
                prop_assert_eq!(pa.pair().inner_product(&b).unwrap(), a.inner_product(pb.pair()).unwrap());
                prop_assert_eq!(delta_project(pa.pair(), kind).unwrap(), pa.clone());
            }
        }
    }
}
