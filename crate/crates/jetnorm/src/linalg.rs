//! Sparse exact vectors and incremental row reduction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ratarith as q;
use crate::scalars::Scalar;

/// Sparse coordinate vector; entries sorted by index, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec(Vec<(usize, Scalar)>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(Vec::new())
    }

    pub fn unit(i: usize) -> Self {
        SparseVec(vec![(i, Scalar::one())])
    }

    /// Builds from unsorted pairs, summing duplicates.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut m: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, v) in pairs {
            *m.entry(i).or_insert_with(Scalar::zero) += &v;
        }
        SparseVec(m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self.0.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.0[k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn leading(&self) -> Option<usize> {
        self.0.first().map(|e| e.0)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|e| e.0)
    }

    pub fn scale(&self, s: &Scalar) -> SparseVec {
        if s.is_zero() {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|(i, v)| (*i, v * s)).collect())
    }

    /// `self + s·other`
    pub fn axpy(&self, s: &Scalar, other: &SparseVec) -> SparseVec {
        if s.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, &b[j].1 * s));
                j += 1;
            } else {
                let v = &a[i].1 + &(&b[j].1 * s);
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec(out)
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&Scalar::one(), other)
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&-Scalar::one(), other)
    }

    /// `Σ a_i·conj(b_i)·w_i`
    pub fn weighted_dot(&self, other: &SparseVec, weight: impl Fn(usize) -> Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += &(&(&a[i].1 * &b[j].1.conj()) * &weight(a[i].0));
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Entries with index in `lo..hi`, shifted down by `lo`.
    pub fn slice(&self, lo: usize, hi: usize) -> SparseVec {
        SparseVec(self.0.iter().filter(|(i, _)| (lo..hi).contains(i)).map(|(i, v)| (i - lo, v.clone())).collect())
    }

    /// All indices shifted up by `by`.
    pub fn shift(&self, by: usize) -> SparseVec {
        SparseVec(self.0.iter().map(|(i, v)| (i + by, v.clone())).collect())
    }

    /// Concatenation where every index of `other` exceeds every index of `self`.
    pub fn concat(mut self, other: SparseVec) -> SparseVec {
        debug_assert!(match (self.0.last(), other.0.first()) {
            (Some(a), Some(b)) => a.0 < b.0,
            _ => true,
        });
        self.0.extend(other.0);
        self
    }

    pub fn retain(&mut self, f: impl Fn(usize) -> bool) {
        self.0.retain(|(i, _)| f(*i));
    }

    pub fn conj(&self) -> SparseVec {
        SparseVec(self.0.iter().map(|(i, v)| (*i, v.conj())).collect())
    }
}

/// Reduced row echelon form built one vector at a time.
///
/// Only columns below `limit` may become pivots; a vector whose reduction has
/// no entry there is handed back as a residual. Keeping the pivot block in
/// reduced form makes the row set canonical for the spanned subspace.
#[derive(Clone, Debug)]
pub struct Echelon {
    limit: usize,
    rows: Vec<SparseVec>,
    pivot_row: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new(limit: usize) -> Self {
        Echelon { limit, rows: Vec::new(), pivot_row: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    /// Rows sorted by pivot column.
    pub fn sorted_rows(&self) -> Vec<(usize, &SparseVec)> {
        self.pivot_row.iter().map(|(&c, &r)| (c, &self.rows[r])).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.pivot_row.keys().copied().collect()
    }

    /// Eliminates every pivot column from `v`.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let mut cursor = 0;
        loop {
            let next = v.0[v.0.partition_point(|e| e.0 < cursor)..]
                .iter()
                .take_while(|e| e.0 < self.limit)
                .find(|e| self.pivot_row.contains_key(&e.0))
                .map(|e| (e.0, e.1.clone()));
            let Some((col, c)) = next else { break };
            v = v.axpy(&-c, &self.rows[self.pivot_row[&col]]);
            cursor = col + 1;
        }
        v
    }

    /// Adds `v` to the row space. Returns `None` if it produced a new pivot,
    /// otherwise the reduced residual.
    pub fn insert(&mut self, v: &SparseVec) -> Option<SparseVec> {
        let r = self.reduce(v);
        let lead = match r.0.iter().map(|e| e.0).find(|&i| i < self.limit) {
            Some(l) => l,
            None => return Some(r),
        };
        let r = r.scale(&r.get(lead).inv().expect("nonzero pivot"));
        for row in &mut self.rows {
            let c = row.get(lead);
            if !c.is_zero() {
                *row = row.axpy(&-c, &r);
            }
        }
        self.pivot_row.insert(lead, self.rows.len());
        self.rows.push(r);
        None
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.iter().all(|e| e.0 >= self.limit)
    }
}

/// RREF basis of the span of `vectors`, ordered by pivot.
pub fn rref_basis(vectors: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut e = Echelon::new(usize::MAX);
    for v in vectors {
        e.insert(&v);
    }
    e.sorted_rows().into_iter().map(|(_, r)| r.clone()).collect()
}

/// Same result as [`rref_basis`], computed from the rank profile modulo a
/// prime and p-adic solves. The answer is checked exactly against every input
/// row; if the check fails, or the input is not real, plain elimination runs.
pub fn rref_fast(rows: &[SparseVec]) -> Vec<SparseVec> {
    rref_modular(rows).unwrap_or_else(|| rref_basis(rows.iter().cloned()))
}

fn rref_modular(rows: &[SparseVec]) -> Option<Vec<SparseVec>> {
    if !rows.iter().all(|r| r.0.iter().all(|(_, c)| c.is_real())) {
        return None;
    }
    // integral rows with the same span
    let int_rows: Vec<BTreeMap<usize, BigInt>> = rows
        .iter()
        .map(|r| {
            let den = r.0.iter().fold(BigInt::one(), |l, (_, c)| q::lcm(&l, c.re().denom()));
            r.0.iter().map(|(k, c)| (*k, c.re().numer() * (&den / c.re().denom()))).collect()
        })
        .collect();
    let real: Vec<Vec<(usize, BigRational)>> =
        int_rows.iter().map(|r| r.iter().map(|(k, v)| (*k, BigRational::from_integer(v.clone()))).collect()).collect();
    let mut profile = crate::modular::independent_rows(&real, crate::modular::prime(0))?;
    if profile.is_empty() {
        return Some(Vec::new());
    }
    profile.sort_by_key(|&(_, c)| c);
    let pivots: Vec<usize> = profile.iter().map(|&(_, c)| c).collect();
    let support: std::collections::BTreeSet<usize> = profile.iter().flat_map(|&(i, _)| int_rows[i].keys().copied()).collect();
    let free: Vec<usize> = support.iter().copied().filter(|c| pivots.binary_search(c).is_err()).collect();
    let get = |i: usize, c: usize| int_rows[i].get(&c).cloned().unwrap_or_else(BigInt::zero);
    let a: Vec<Vec<BigInt>> = profile.iter().map(|&(i, _)| pivots.iter().map(|&c| get(i, c)).collect()).collect();
    let lifter = crate::modular::Lifter::new(&a)?;
    let mut columns = Vec::with_capacity(free.len());
    for &c in &free {
        let b: Vec<BigInt> = profile.iter().map(|&(i, _)| get(i, c)).collect();
        columns.push(lifter.solve(&b, false)?);
    }
    // echelon shape: nothing left of a pivot
    for (t, &pc) in pivots.iter().enumerate() {
        for (f, &c) in free.iter().enumerate() {
            if c < pc && !columns[f].numer[t].is_zero() {
                return None;
            }
        }
    }
    // every input row is the combination of the candidate rows given by its
    // pivot entries
    for r in &int_rows {
        if r.keys().any(|c| !support.contains(c)) {
            return None;
        }
        for (f, &c) in free.iter().enumerate() {
            let col = &columns[f];
            let combo: BigInt = pivots
                .iter()
                .enumerate()
                .filter_map(|(t, pc)| r.get(pc).map(|v| v * &col.numer[t]))
                .sum();
            let want = r.get(&c).map_or_else(BigInt::zero, |v| v * &col.denom);
            if combo != want {
                return None;
            }
        }
    }
    let rationals: Vec<Vec<BigRational>> = columns.iter().map(|s| s.to_rationals()).collect();
    Some(
        pivots
            .iter()
            .enumerate()
            .map(|(t, &pc)| {
                let mut entries = vec![(pc, Scalar::one())];
                entries.extend(
                    free.iter()
                        .zip(&rationals)
                        .filter(|(_, x)| !x[t].is_zero())
                        .map(|(&c, x)| (c, Scalar::real(x[t].clone()))),
                );
                entries.sort_by_key(|e| e.0);
                SparseVec(entries)
            })
            .collect(),
    )
}

/// Null space of the rows `rows` (as functionals on `dim` coordinates),
/// returned as an RREF basis.
pub fn null_space(rows: &[SparseVec], dim: usize) -> Vec<SparseVec> {
    let basis = rref_fast(rows);
    let pivots: Vec<usize> = basis.iter().map(|r| r.leading().unwrap()).collect();
    let mut out = Vec::new();
    for f in 0..dim {
        if pivots.binary_search(&f).is_ok() {
            continue;
        }
        let mut pairs = vec![(f, Scalar::one())];
        for (r, &p) in basis.iter().zip(&pivots) {
            let c = r.get(f);
            if !c.is_zero() {
                pairs.push((p, -c));
            }
        }
        out.push(SparseVec::from_pairs(pairs));
    }
    rref_fast(&out)
}

/// Solves the square system `m·x = rhs` exactly; `None` when singular.
pub fn solve_dense(mut m: Vec<Vec<Scalar>>, mut rhs: Vec<Scalar>) -> Option<Vec<Scalar>> {
    if m.iter().flatten().chain(&rhs).all(Scalar::is_real) {
        return solve_integral(&m, &rhs);
    }
    let n = rhs.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        rhs.swap(c, p);
        let inv = m[c][c].inv()?;
        for v in m[c].iter_mut().skip(c) {
            *v = &*v * &inv;
        }
        rhs[c] = &rhs[c] * &inv;
        for r in 0..n {
            if r == c || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone();
            for k in c..n {
                if !m[c][k].is_zero() {
                    let v = &m[r][k] - &(&f * &m[c][k]);
                    m[r][k] = v;
                }
            }
            rhs[r] = &rhs[r] - &(&f * &rhs[c]);
        }
    }
    Some(rhs)
}

/// Real systems: clear denominators row by row, then fraction-free
/// (Bareiss) elimination so the only gcds are in the final back substitution.
fn solve_integral(m: &[Vec<Scalar>], rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = rhs.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let den = row.iter().chain(std::iter::once(b)).fold(BigInt::one(), |l, x| q::lcm(&l, x.re().denom()));
            row.iter().chain(std::iter::once(b)).map(|x| x.re().numer() * (&den / x.re().denom())).collect()
        })
        .collect();
    if let Some(x) = crate::modular::solve_integral(&a.iter().map(|r| r[..n].to_vec()).collect::<Vec<_>>(), &a.iter().map(|r| r[n].clone()).collect::<Vec<_>>()) {
        return Some(x.into_iter().map(Scalar::real).collect());
    }
    let mut prev = BigInt::one();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let (top, rest) = a.split_at_mut(c + 1);
        let pivot = &top[c];
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for k in c + 1..=n {
                row[k] = (&pivot[c] * &row[k] - &f * &pivot[k]) / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = a[c][c].clone();
    }
    let mut x: Vec<BigRational> = vec![BigRational::zero(); n];
    for c in (0..n).rev() {
        let mut s = BigRational::from_integer(a[c][n].clone());
        for k in c + 1..n {
            if !a[c][k].is_zero() {
                s = q::sub(&s, &q::mul(&x[k], &BigRational::from_integer(a[c][k].clone())));
            }
        }
        x[c] = q::div(&s, &BigRational::from_integer(a[c][c].clone()));
    }
    Some(x.into_iter().map(Scalar::real).collect())
}

/// Groups vectors into classes whose supports overlap transitively.
pub fn support_components(vectors: &[SparseVec]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..vectors.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, v) in vectors.iter().enumerate() {
        for i in v.indices() {
            match owner.get(&i) {
                Some(&o) => {
                    let (a, b) = (find(&mut parent, o), find(&mut parent, k));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                None => {
                    owner.insert(i, k);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for k in 0..vectors.len() {
        let r = find(&mut parent, k);
        groups.entry(r).or_default().push(k);
    }
    groups.into_values().collect()
}

/// Orthogonal projection of `v` onto the span of the independent `gens`
/// under the weighted inner product, solved component by component.
pub fn project_onto(v: &SparseVec, gens: &[SparseVec], weight: impl Fn(usize) -> Scalar + Copy) -> SparseVec {
    let mut out = SparseVec::new();
    for comp in support_components(gens) {
        let touches = comp.iter().any(|&k| gens[k].indices().any(|i| !v.get(i).is_zero()));
        if !touches {
            continue;
        }
        let g: Vec<&SparseVec> = comp.iter().map(|&k| &gens[k]).collect();
        let gram: Vec<Vec<Scalar>> =
            g.iter().map(|gk| g.iter().map(|gl| gl.weighted_dot(gk, weight)).collect()).collect();
        let rhs: Vec<Scalar> = g.iter().map(|gk| v.weighted_dot(gk, weight)).collect();
        let c = solve_dense(gram, rhs).expect("generators are independent");
        for (ck, gk) in c.iter().zip(&g) {
            out = out.axpy(ck, gk);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sv(pairs: &[(usize, i64)]) -> SparseVec {
        SparseVec::from_pairs(pairs.iter().map(|&(i, v)| (i, Scalar::from_int(v))))
    }

    #[test]
    fn axpy_merges() {
        let a = sv(&[(0, 1), (2, 3)]);
        let b = sv(&[(1, 1), (2, 1)]);
        assert_eq!(a.axpy(&Scalar::from_int(-3), &b), sv(&[(0, 1), (1, -3)]));
    }

    #[test]
    fn echelon_residuals_span_kernel() {
        // columns of [[1,1,0],[0,0,1]] augmented by identity
        let cols = [sv(&[(0, 1), (3, 1)]), sv(&[(0, 1), (4, 1)]), sv(&[(1, 1), (5, 1)])];
        let mut e = Echelon::new(3);
        let residuals: Vec<_> = cols.iter().filter_map(|c| e.insert(c)).collect();
        assert_eq!(e.rank(), 2);
        assert_eq!(residuals, vec![sv(&[(3, -1), (4, 1)])]);
    }

    #[test]
    fn null_space_and_solve() {
        let rows = vec![sv(&[(0, 1), (1, 2)]), sv(&[(2, 1)])];
        let expect = SparseVec::from_pairs([(0, Scalar::one()), (1, Scalar::ratio(-1, 2))]);
        assert_eq!(null_space(&rows, 3), vec![expect]);
        let x = solve_dense(
            vec![vec![Scalar::from_int(2), Scalar::from_int(1)], vec![Scalar::from_int(1), Scalar::from_int(3)]],
            vec![Scalar::from_int(3), Scalar::from_int(5)],
        )
        .unwrap();
        assert_eq!(x, vec![Scalar::ratio(4, 5), Scalar::ratio(7, 5)]);
    }

    proptest! {
        #[test]
        fn modular_rref_matches_elimination(
            rows in proptest::collection::vec(proptest::collection::vec((0usize..7, -4i64..=4, 1i64..=3), 0..5), 0..7),
        ) {
            let rows: Vec<SparseVec> = rows
                .iter()
                .map(|r| SparseVec::from_pairs(r.iter().map(|&(k, n, d)| (k, Scalar::ratio(n, d)))))
                .collect();
            prop_assert_eq!(rref_fast(&rows), rref_basis(rows.iter().cloned()));
        }

        #[test]
        fn projection_residual_is_orthogonal(
            gens in proptest::collection::vec(proptest::collection::vec((0usize..6, -3i64..=3), 1..4), 1..4),
            v in proptest::collection::vec((0usize..6, -3i64..=3), 0..6),
        ) {
            let basis = rref_basis(gens.iter().map(|g| sv(g)));
            let v = sv(&v);
            let w = |i: usize| Scalar::from_int(i as i64 + 1);
            let p = project_onto(&v, &basis, w);
            let r = v.sub(&p);
            for g in &basis {
                prop_assert!(r.weighted_dot(g, w).is_zero());
            }
            let mut e = Echelon::new(usize::MAX);
            for g in &basis { e.insert(g); }
            prop_assert!(e.contains(&p));
        }
    }
}
