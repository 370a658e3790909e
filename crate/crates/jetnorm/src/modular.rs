//! Word-size modular arithmetic behind the exact solvers.
//!
//! Dense rational systems whose solutions run to thousands of digits are
//! solved by p-adic lifting: one inverse modulo a 62-bit prime, then cheap
//! lifting steps and rational reconstruction. Every answer is checked against
//! the original system before it is returned, so a bad prime can only cost
//! time, never correctness.

use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &b in &BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `k`-th prime below `2^62`, counting down; `k < 8`.
pub fn prime(k: usize) -> u64 {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| (1..(1u64 << 62)).rev().step_by(2).filter(|&n| is_prime(n)).take(8).collect())[k]
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    (a % p != 0).then(|| pow_mod(a, p - 2, p))
}

pub fn reduce(n: &BigInt, p: u64) -> u64 {
    let r = (n.magnitude() % p).to_u64().expect("residue below p");
    if n.sign() == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

/// `n/d mod p`, `None` if `p` divides the denominator.
pub fn reduce_rational(r: &BigRational, p: u64) -> Option<u64> {
    let d = inv_mod(reduce(r.denom(), p), p)?;
    Some(mul_mod(reduce(r.numer(), p), d, p))
}

/// Inverse of a square matrix modulo `p`, `None` when singular.
fn inverse_mod(a: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let n = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|k| u64::from(k == i)));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| m[r][c] != 0)?;
        m.swap(c, piv);
        let inv = inv_mod(m[c][c], p)?;
        for v in m[c].iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        let pivot_row = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == c || row[c] == 0 {
                continue;
            }
            let f = p - row[c];
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                if *pv != 0 {
                    *v = ((*v as u128 + f as u128 * *pv as u128) % p as u128) as u64;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// A maximal set of rows independent modulo `p`, in input order, each with
/// its pivot column. Rows independent modulo `p` are independent over ℚ, and
/// the pivots are the rank profile modulo `p`. `None` if some denominator
/// vanishes modulo `p`.
pub fn independent_rows(rows: &[Vec<(usize, BigRational)>], p: u64) -> Option<Vec<(usize, usize)>> {
    let mut basis: Vec<(usize, Vec<(usize, u64)>)> = Vec::new();
    let mut pivot_of: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    let mut kept = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut v: std::collections::BTreeMap<usize, u64> = std::collections::BTreeMap::new();
        for (k, c) in row {
            let r = reduce_rational(c, p)?;
            if r != 0 {
                v.insert(*k, r);
            }
        }
        // eliminate existing pivots in increasing column order
        loop {
            let Some((&col, &c)) = v.iter().find(|(col, _)| pivot_of.contains_key(col)) else { break };
            let (_, b) = &basis[pivot_of[&col]];
            let f = p - c;
            for &(k, bv) in b {
                let e = v.entry(k).or_insert(0);
                *e = ((*e as u128 + f as u128 * bv as u128) % p as u128) as u64;
                if *e == 0 {
                    v.remove(&k);
                }
            }
        }
        let Some((&lead, &lc)) = v.iter().next() else { continue };
        let inv = inv_mod(lc, p).expect("nonzero residue");
        let normalized: Vec<(usize, u64)> = v.into_iter().map(|(k, x)| (k, mul_mod(x, inv, p))).collect();
        pivot_of.insert(lead, basis.len());
        basis.push((lead, normalized));
        kept.push((i, lead));
    }
    Some(kept)
}

/// `n/d` with `|n|, d ≤ bound` and `n ≡ d·x (mod m)`.
fn rational_reconstruct(x: &BigInt, m: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), x.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1) = (r1, r2);
        (t0, t1) = (t1, t2);
    }
    if t1.is_zero() || t1.abs() > *bound {
        return None;
    }
    if t1.is_negative() {
        Some((-r1, -t1))
    } else {
        Some((r1, t1))
    }
}

fn symmetric(x: BigInt, m: &BigInt) -> BigInt {
    let x = ((x % m) + m) % m;
    if &x + &x > *m {
        x - m
    } else {
        x
    }
}

/// `Σ u_i v_i mod p`, reducing only every eight products.
fn dot_mod(u: &[u64], v: &[u64], p: u64) -> u64 {
    let p = p as u128;
    let mut acc = 0u128;
    for (k, (&a, &b)) in u.iter().zip(v).enumerate() {
        acc += a as u128 * b as u128;
        if k % 8 == 7 {
            acc %= p;
        }
    }
    (acc % p) as u64
}

/// `acc += a·d` on little-endian limbs; `acc` has room for the carry.
fn mul_add(acc: &mut [u64], a: &[u64], d: u64) {
    let mut carry = 0u128;
    for (slot, &limb) in acc.iter_mut().zip(a) {
        let t = *slot as u128 + limb as u128 * d as u128 + carry;
        *slot = t as u64;
        carry = t >> 64;
    }
    for slot in &mut acc[a.len()..] {
        if carry == 0 {
            break;
        }
        let t = *slot as u128 + carry;
        *slot = t as u64;
        carry = t >> 64;
    }
}

fn from_limbs(v: &[u64]) -> BigInt {
    BigInt::from_biguint(Sign::Plus, num_bigint::BigUint::new(v.iter().flat_map(|&l| [l as u32, (l >> 32) as u32]).collect()))
}

/// Solutions of `a·x = b` for one nonsingular integral `a` and many `b`.
pub struct Lifter<'a> {
    a: &'a [Vec<BigInt>],
    /// Nonzero entries of `a` as `(column, negative, magnitude limbs)`.
    limbs: Vec<Vec<(usize, bool, Vec<u64>)>>,
    width: usize,
    p: u64,
    inv: Vec<Vec<u64>>,
    a_bits: Vec<u64>,
    /// `wᵀa` for a fixed small `w`, a cheap filter for wrong reconstructions.
    probe: Vec<BigInt>,
    w: Vec<BigInt>,
}

/// Integral solution numerators over one common positive denominator.
pub struct Solution {
    pub numer: Vec<BigInt>,
    pub denom: BigInt,
}

impl Solution {
    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.numer.iter().map(|n| crate::ratarith::reduce_by(n.clone(), &self.denom)).collect()
    }
}

impl<'a> Lifter<'a> {
    /// `None` when `a` is singular modulo every tried prime.
    pub fn new(a: &'a [Vec<BigInt>]) -> Option<Self> {
        let n = a.len();
        let (p, inv) = (0..4).find_map(|k| {
            let p = prime(k);
            let am: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| reduce(x, p)).collect()).collect();
            inverse_mod(&am, p).map(|inv| (p, inv))
        })?;
        let a_bits = a.iter().map(|r| r.iter().map(|x| x.bits()).max().unwrap_or(0)).collect();
        let w: Vec<BigInt> = (0..n).map(|i| BigInt::from((i as i64 * 7919 + 13) % 101 - 50)).collect();
        let probe = (0..n).map(|j| a.iter().zip(&w).map(|(r, wi)| &r[j] * wi).sum()).collect();
        let limbs: Vec<Vec<(usize, bool, Vec<u64>)>> = a
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(j, x)| (j, x.is_negative(), x.magnitude().to_u64_digits()))
                    .collect()
            })
            .collect();
        let width = limbs.iter().flatten().map(|e| e.2.len()).max().unwrap_or(0) + 2;
        Some(Lifter { a, limbs, width, p, inv, a_bits, probe, w })
    }

    /// `exact` re-checks `a·x = b` in full; otherwise only a random
    /// combination of the rows is checked and the caller must verify.
    pub fn solve(&self, b: &[BigInt], exact: bool) -> Option<Solution> {
        let (p, n) = (self.p, b.len());
        if b.iter().all(Zero::is_zero) {
            return Some(Solution { numer: vec![BigInt::zero(); n], denom: BigInt::one() });
        }
        // Hadamard-type bound on the numerators and denominators of Cramer's rule
        let b_bits = b.iter().map(|x| x.bits()).max().unwrap_or(0);
        let log_n = (n as f64).log2().ceil() as u64;
        let log_bound: u64 = self.a_bits.iter().map(|&r| r.max(b_bits) + 2 + log_n).sum();
        let needed_bits = 2 * log_bound + 2;
        let pb = BigInt::from(p);
        let mut residual: Vec<BigInt> = b.to_vec();
        // x = Σ digits[k]·p^k, materialized only when a reconstruction is tried
        let mut x = vec![BigInt::zero(); n];
        let mut modulus = BigInt::one();
        let mut pending: Vec<Vec<u64>> = Vec::new();
        let mut steps = 0u64;
        let mut next_try = 4u64;
        let (mut pos, mut neg) = (vec![0u64; self.width], vec![0u64; self.width]);
        loop {
            let rm: Vec<u64> = residual.iter().map(|r| reduce(r, p)).collect();
            let digit: Vec<u64> = self.inv.iter().map(|row| dot_mod(row, &rm, p)).collect();
            for (ri, row) in residual.iter_mut().zip(&self.limbs) {
                pos.fill(0);
                neg.fill(0);
                for (j, negative, mag) in row {
                    let d = digit[*j];
                    if d != 0 {
                        // r − a·d: negative entries add
                        mul_add(if *negative { &mut pos } else { &mut neg }, mag, d);
                    }
                }
                let s = std::mem::take(ri) + from_limbs(&pos) - from_limbs(&neg);
                *ri = s / &pb;
            }
            pending.push(digit);
            steps += 1;
            let exhausted = steps * 61 >= needed_bits;
            let settled = residual.iter().all(Zero::is_zero);
            if steps >= next_try || exhausted || settled {
                next_try = next_try * 3 / 2 + 1;
                // Horner over the pending digits, then shift into place
                let mut chunk = vec![BigInt::zero(); n];
                for digit in pending.iter().rev() {
                    for (c, d) in chunk.iter_mut().zip(digit) {
                        *c *= p;
                        *c += *d;
                    }
                }
                for (xi, c) in x.iter_mut().zip(chunk) {
                    *xi += c * &modulus;
                }
                modulus *= pb.pow(pending.len() as u32);
                pending.clear();
                if let Some(sol) = reconstruct(&x, &modulus) {
                    let ok = if exact { self.check(b, &sol) } else { self.probe_ok(b, &sol) };
                    if ok {
                        return Some(sol);
                    }
                }
                if exhausted {
                    return None;
                }
            }
        }
    }

    fn probe_ok(&self, b: &[BigInt], sol: &Solution) -> bool {
        let lhs: BigInt = self.probe.iter().zip(&sol.numer).map(|(c, x)| c * x).sum();
        let rhs: BigInt = self.w.iter().zip(b).map(|(w, bi)| w * bi).sum();
        lhs == rhs * &sol.denom
    }

    fn check(&self, b: &[BigInt], sol: &Solution) -> bool {
        self.a.iter().zip(b).all(|(row, bi)| {
            let s: BigInt = row.iter().zip(&sol.numer).filter(|(aij, _)| !aij.is_zero()).map(|(aij, xj)| aij * xj).sum();
            s == bi * &sol.denom
        })
    }
}

/// Solves `a·x = b` for nonsingular integral `a`, checked exactly.
/// `None` leaves the caller to fall back to elimination.
pub fn solve_integral(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigRational>> {
    if b.is_empty() {
        return Some(Vec::new());
    }
    Lifter::new(a)?.solve(b, true).map(|s| s.to_rationals())
}

fn reconstruct(x: &[BigInt], m: &BigInt) -> Option<Solution> {
    let bound = (m / 2u32).sqrt();
    let mut den = BigInt::one();
    let mut parts = Vec::with_capacity(x.len());
    for xi in x {
        let y = symmetric(xi * &den, m);
        if y.abs() <= bound {
            parts.push((y, den.clone()));
            continue;
        }
        let (num, d) = rational_reconstruct(&((y % m + m) % m), m, &bound)?;
        den *= &d;
        if den.bits() > bound.bits() {
            return None;
        }
        parts.push((num, den.clone()));
    }
    let numer = parts.into_iter().map(|(n, d)| if d == den { n } else { n * (&den / d) }).collect();
    Some(Solution { numer, denom: den })
}
