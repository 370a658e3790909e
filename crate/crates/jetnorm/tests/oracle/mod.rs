//! Independent reference arithmetic for the integration tests.
//!
//! Polynomials are plain exponent maps and matrices are dense vectors of
//! them; linear algebra is textbook Gauss-Jordan on dense rows. Nothing here
//! calls into the library except to read coefficients out of a `MatrixJet`.
#![allow(dead_code)]

use std::collections::BTreeMap;

use jetnorm::{MatrixJet, Scalar};
use num_traits::{One, Zero};

pub type Poly = BTreeMap<Vec<u32>, Scalar>;

#[derive(Clone, Debug, PartialEq)]
pub struct OMat {
    pub rows: usize,
    pub cols: usize,
    pub e: Vec<Poly>,
}

impl OMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        OMat { rows, cols, e: vec![Poly::new(); rows * cols] }
    }

    /// `E_ab · x^exps`
    pub fn unit(rows: usize, cols: usize, a: usize, b: usize, exps: &[u32], c: Scalar) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.e[a * cols + b].insert(exps.to_vec(), c);
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Poly {
        &self.e[i * self.cols + j]
    }

    pub fn from_jet(a: &MatrixJet) -> Self {
        let mut m = Self::zeros(a.rows(), a.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                for (k, c) in a.entry(i, j).terms() {
                    m.e[i * a.cols() + j].insert(k.exponents().to_vec(), c.clone());
                }
            }
        }
        m
    }

    pub fn add(&self, o: &OMat) -> OMat {
        OMat { rows: self.rows, cols: self.cols, e: self.e.iter().zip(&o.e).map(|(a, b)| padd(a, b)).collect() }
    }

    pub fn sub(&self, o: &OMat) -> OMat {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> OMat {
        OMat { rows: self.rows, cols: self.cols, e: self.e.iter().map(|p| pscale(p, s)).collect() }
    }

    /// Product with every term of total degree above `max` discarded.
    pub fn mul(&self, o: &OMat, max: u32) -> OMat {
        assert_eq!(self.cols, o.rows);
        let mut out = OMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Poly::new();
                for k in 0..self.cols {
                    acc = padd(&acc, &pmul(self.at(i, k), o.at(k, j), max));
                }
                out.e[i * o.cols + j] = acc;
            }
        }
        out
    }

    pub fn transpose(&self) -> OMat {
        let mut out = OMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.e[j * self.rows + i] = self.at(i, j).clone();
            }
        }
        out
    }

    /// Terms of total degree in `lo..=hi`.
    pub fn band(&self, lo: u32, hi: u32) -> OMat {
        OMat {
            rows: self.rows,
            cols: self.cols,
            e: self
                .e
                .iter()
                .map(|p| p.iter().filter(|(k, _)| (lo..=hi).contains(&deg(k))).map(|(k, v)| (k.clone(), v.clone())).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|p| p.is_empty())
    }
}

pub fn deg(k: &[u32]) -> u32 {
    k.iter().sum()
}

pub fn padd(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (k, v) in b {
        let s = out.get(k).cloned().unwrap_or_else(Scalar::zero);
        let s = &s + v;
        if s.is_zero() {
            out.remove(k);
        } else {
            out.insert(k.clone(), s);
        }
    }
    out
}

pub fn pscale(a: &Poly, s: &Scalar) -> Poly {
    if s.is_zero() {
        return Poly::new();
    }
    a.iter().map(|(k, v)| (k.clone(), v * s)).collect()
}

pub fn pmul(a: &Poly, b: &Poly, max: u32) -> Poly {
    let mut out = Poly::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            let k: Vec<u32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            if deg(&k) <= max {
                out = padd(&out, &[(k, va * vb)].into_iter().collect());
            }
        }
    }
    out
}

/// `∂^by p`
pub fn pderiv(p: &Poly, by: &[u32]) -> Poly {
    let mut out = Poly::new();
    for (k, v) in p {
        if k.iter().zip(by).any(|(a, b)| a < b) {
            continue;
        }
        let mut c = v.clone();
        for (a, b) in k.iter().zip(by) {
            for t in 0..*b {
                c = &c * &Scalar::from_int(i64::from(a - t));
            }
        }
        out = padd(&out, &[(k.iter().zip(by).map(|(a, b)| a - b).collect(), c)].into_iter().collect());
    }
    out
}

pub fn fact(k: &[u32]) -> Scalar {
    let mut f = Scalar::one();
    for e in k {
        for t in 1..=*e {
            f = &f * &Scalar::from_int(i64::from(t));
        }
    }
    f
}

/// `Σ_I Σ_entries a_I · conj(b_I) · I!`
pub fn inner(a: &OMat, b: &OMat) -> Scalar {
    let mut acc = Scalar::zero();
    for (pa, pb) in a.e.iter().zip(&b.e) {
        for (k, va) in pa {
            if let Some(vb) = pb.get(k) {
                acc = &acc + &(&(va * &vb.conj()) * &fact(k));
            }
        }
    }
    acc
}

/// All exponent vectors in `p` variables with total degree in `lo..=hi`.
pub fn exponents(p: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    fn rec(p: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == p {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(p, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for d in lo..=hi {
        rec(p, d, &mut Vec::new(), &mut out);
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Row-reduces in place and returns the pivot columns.
pub fn gauss_jordan(m: &mut [Vec<Scalar>]) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let d = &m[r][k] * &f;
                    m[i][k] = &m[i][k] - &d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    gauss_jordan(&mut rows.to_vec()).len()
}

/// Null space of the matrix with the given rows (`cols` unknowns).
pub fn null_space(rows: &[Vec<Scalar>], cols: usize) -> Vec<Vec<Scalar>> {
    let mut m = rows.to_vec();
    let pivots = gauss_jordan(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(); cols];
            v[f] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&m[r][f];
            }
            v
        })
        .collect()
}

/// Independently enumerated Lie algebra basis for a kind, degrees `1..=j`:
/// pairs `(ν_l, ν_r)`.
pub fn lie_basis(kind: &str, m: usize, n: usize, p: usize, j: u32) -> Vec<(OMat, OMat)> {
    let mut out = Vec::new();
    let one = Scalar::one();
    for k in exponents(p, 1, j) {
        let lefts: Vec<OMat> = (0..m * m).map(|t| OMat::unit(m, m, t / m, t % m, &k, one.clone())).collect();
        let rights: Vec<OMat> = (0..n * n).map(|t| OMat::unit(n, n, t / n, t % n, &k, one.clone())).collect();
        match kind {
            "left" => out.extend(lefts.into_iter().map(|l| (l, OMat::zeros(n, n)))),
            "right" => out.extend(rights.into_iter().map(|r| (OMat::zeros(m, m), r))),
            "two-sided" => {
                out.extend(lefts.into_iter().map(|l| (l, OMat::zeros(n, n))));
                out.extend(rights.into_iter().map(|r| (OMat::zeros(m, m), r)));
            }
            "conjugacy" => out.extend(lefts.into_iter().map(|l| (l.clone(), l))),
            "congruence" => out.extend(lefts.into_iter().map(|l| {
                let r = l.transpose().scale(&Scalar::from_int(-1));
                (l, r)
            })),
            other => panic!("unknown kind {other}"),
        }
    }
    out
}

/// `V^(j)(A)` by brute force, as dense coordinate vectors over
/// `exponents(p, j, j) × rows × cols`.
pub fn v_space_brute(a: &OMat, kind: &str, p: usize, j: u32) -> Vec<Vec<Scalar>> {
    let (m, n) = (a.rows, a.cols);
    let base = a.band(0, j - 1);
    let basis = lie_basis(kind, m, n, p, j);
    let images: Vec<OMat> = basis.iter().map(|(l, r)| l.mul(&base, j).sub(&base.mul(r, j))).collect();
    let low = exponents(p, 0, j - 1);
    let high = exponents(p, j, j);
    let coords = |img: &OMat, monos: &[Vec<u32>]| -> Vec<Scalar> {
        let mut v = Vec::new();
        for k in monos {
            for e in &img.e {
                v.push(e.get(k).cloned().unwrap_or_else(Scalar::zero));
            }
        }
        v
    };
    let low_cols: Vec<Vec<Scalar>> = images.iter().map(|i| coords(i, &low)).collect();
    let high_cols: Vec<Vec<Scalar>> = images.iter().map(|i| coords(i, &high)).collect();
    let nrows = low_cols.first().map_or(0, |c| c.len());
    // rows of the low-degree map, one per low coordinate
    let rows: Vec<Vec<Scalar>> = (0..nrows).map(|r| low_cols.iter().map(|c| c[r].clone()).collect()).collect();
    let kernel = if nrows == 0 {
        (0..basis.len())
            .map(|f| (0..basis.len()).map(|t| if t == f { Scalar::one() } else { Scalar::zero() }).collect())
            .collect()
    } else {
        null_space(&rows, basis.len())
    };
    let dim_high = high.len() * m * n;
    kernel
        .iter()
        .map(|z| {
            (0..dim_high)
                .map(|r| z.iter().zip(&high_cols).fold(Scalar::zero(), |acc, (c, col)| &acc + &(c * &col[r])))
                .collect()
        })
        .collect()
}

/// Coordinates of the degree-`j` part of `a` in the layout of [`v_space_brute`].
pub fn homogeneous_coords(a: &OMat, p: usize, j: u32) -> Vec<Scalar> {
    let mut v = Vec::new();
    for k in exponents(p, j, j) {
        for e in &a.e {
            v.push(e.get(&k).cloned().unwrap_or_else(Scalar::zero));
        }
    }
    v
}
