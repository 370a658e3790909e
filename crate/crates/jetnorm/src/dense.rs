//! Small dense matrices of exact scalars: the constant coefficients `A_I`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalars::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConstMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ConstMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ConstMatrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    /// Matrix unit `E_{ab}`.
    pub fn unit(rows: usize, cols: usize, a: usize, b: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.data[a * cols + b] = Scalar::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(ConstMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ConstMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Conjugate transpose `M*`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn conj(&self) -> Self {
        ConstMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Scalar::conj).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        ConstMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ConstMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ConstMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).fold(Scalar::zero(), |acc, i| &acc + self.get(i, i))
    }

    /// Row echelon reduction; returns `(rref, pivot columns, transform)` with
    /// `transform · self = rref`.
    pub fn rref_with_transform(&self) -> (Self, Vec<usize>, Self) {
        let mut m = self.clone();
        let mut t = Self::identity(self.rows);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            t.swap_rows(r, p);
            let inv = m.get(r, c).inv().unwrap();
            m.scale_row(r, &inv);
            t.scale_row(r, &inv);
            for i in 0..self.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = -m.get(i, c);
                    m.add_row_multiple(i, r, &f);
                    t.add_row_multiple(i, r, &f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots, t)
    }

    pub fn rank(&self) -> usize {
        self.rref_with_transform().1.len()
    }

    pub fn det(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(Scalar::zero());
            };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv().unwrap();
            for i in c + 1..n {
                if !m.get(i, c).is_zero() {
                    let f = -&(m.get(i, c) * &inv);
                    m.add_row_multiple(i, c, &f);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let (r, pivots, t) = self.rref_with_transform();
        if pivots.len() < self.rows || !r.is_identity() {
            return Err(Error::SingularConstantTerm);
        }
        Ok(t)
    }

    /// Invertible `P`, `Q` with `P · self · Q = [[1_r, 0], [0, 0]]`.
    pub fn rank_normal_form(&self) -> (Self, Self, usize) {
        let (rref, pivots, p) = self.rref_with_transform();
        let rank = pivots.len();
        // column operations on the rref: move pivots first, clear the rest of pivot rows
        let mut q = Self::identity(self.cols);
        let mut order: Vec<usize> = pivots.clone();
        order.extend((0..self.cols).filter(|c| !pivots.contains(c)));
        // q1 clears non-pivot entries in pivot rows: col_c -= rref[r][c] * col_{pivot r}
        for (r, &pc) in pivots.iter().enumerate() {
            for c in 0..self.cols {
                if c != pc && !rref.get(r, c).is_zero() {
                    let f = -rref.get(r, c);
                    for i in 0..self.cols {
                        let v = q.get(i, pc) * &f;
                        let cur = q.get(i, c) + &v;
                        q.set(i, c, cur);
                    }
                }
            }
        }
        let perm = Self::from_fn(self.cols, self.cols, |i, j| if order[j] == i { Scalar::one() } else { Scalar::zero() });
        (p, q.mul(&perm), rank)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: &Scalar) {
        for j in 0..self.cols {
            let v = self.get(r, j) * s;
            self.set(r, j, v);
        }
    }

    /// row_i += f · row_r
    fn add_row_multiple(&mut self, i: usize, r: usize, f: &Scalar) {
        for j in 0..self.cols {
            let src = self.get(r, j);
            if !src.is_zero() {
                let v = self.get(i, j) + &(src * f);
                self.set(i, j, v);
            }
        }
    }
}

impl fmt::Debug for ConstMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ConstMatrix {
        ConstMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn inverse_and_det() {
        let a = m(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.det().unwrap(), Scalar::one());
        assert_eq!(a.mul(&a.inverse().unwrap()), ConstMatrix::identity(2));
        let s = m(&[&[1, 2], &[2, 4]]);
        assert!(s.det().unwrap().is_zero());
        assert_eq!(s.inverse(), Err(Error::SingularConstantTerm));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det().unwrap(), Scalar::from_int(-1));
    }

    #[test]
    fn rank_normal_form_reduces() {
        let a = m(&[&[0, 2, 4], &[0, 1, 2]]);
        let (p, q, r) = a.rank_normal_form();
        assert_eq!(r, 1);
        let expect = m(&[&[1, 0, 0], &[0, 0, 0]]);
        assert_eq!(p.mul(&a).mul(&q), expect);
        assert!(!p.det().unwrap().is_zero());
        assert!(!q.det().unwrap().is_zero());

        let b = m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        let (p, q, r) = b.rank_normal_form();
        assert_eq!(r, 3);
        assert_eq!(p.mul(&b).mul(&q), ConstMatrix::identity(3));
    }
}
