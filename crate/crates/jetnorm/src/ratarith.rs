//! Rational arithmetic with fewer and cheaper gcds.
//!
//! `num-rational` reduces every result with a binary gcd, which is slow once
//! numerators reach a few thousand bits, and it reduces products a second time
//! after cross-cancelling. The helpers here cancel only what can share a
//! factor and use Lehmer's gcd on large operands.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn bit_len(v: &[u64]) -> u64 {
    v.last().map_or(0, |top| 64 * v.len() as u64 - top.leading_zeros() as u64)
}

/// Bits `shift..shift + 62` of `v`.
fn head(v: &[u64], shift: u64) -> i128 {
    let (limb, off) = ((shift / 64) as usize, shift % 64);
    let lo = v.get(limb).copied().unwrap_or(0) as u128;
    let hi = v.get(limb + 1).copied().unwrap_or(0) as u128;
    ((((hi << 64) | lo) >> off) & ((1u128 << 62) - 1)) as i128
}

fn to_limbs(a: &BigUint) -> Vec<u64> {
    a.to_u64_digits()
}

fn from_limbs(v: &[u64]) -> BigUint {
    BigUint::new(v.iter().flat_map(|&l| [l as u32, (l >> 32) as u32]).collect())
}

/// Lehmer's gcd on magnitudes, updating limb vectors in place.
pub fn gcd_uint(a: &BigUint, b: &BigUint) -> BigUint {
    let (a, b) = if a >= b { (a, b) } else { (b, a) };
    if b.is_zero() {
        return a.clone();
    }
    let (mut a, mut b) = (to_limbs(a), to_limbs(b));
    loop {
        if b.is_empty() {
            return from_limbs(&a);
        }
        if b.len() == 1 {
            let small = b[0];
            let r = (from_limbs(&a) % small).to_u64().expect("remainder below a u64");
            return BigUint::from(gcd_u64(small, r));
        }
        let shift = bit_len(&a).saturating_sub(62);
        let (mut x, mut y) = (head(&a, shift), head(&b, shift));
        let (mut ca, mut cb, mut cc, mut cd) = (1i128, 0i128, 0i128, 1i128);
        while y + cc != 0 && y + cd != 0 {
            let q = (x + ca) / (y + cc);
            if q != (x + cb) / (y + cd) {
                break;
            }
            (ca, cc) = (cc, ca - q * cc);
            (cb, cd) = (cd, cb - q * cd);
            (x, y) = (y, x - q * y);
        }
        if cb == 0 {
            // the quotient does not fit the head; take one full division step
            let (ai, bi) = (from_limbs(&a), from_limbs(&b));
            a = b;
            b = to_limbs(&(ai % bi));
            continue;
        }
        // |cofactors| < 2^62, so each limb combination fits an i128
        b.resize(a.len(), 0);
        let (mut c1, mut c2) = (0i128, 0i128);
        for (al, bl) in a.iter_mut().zip(b.iter_mut()) {
            let (ai, bi) = (*al as i128, *bl as i128);
            let t1 = ca * ai + cb * bi + c1;
            let t2 = cc * ai + cd * bi + c2;
            *al = t1 as u64;
            *bl = t2 as u64;
            c1 = t1 >> 64;
            c2 = t2 >> 64;
        }
        debug_assert!(c1 == 0 && c2 == 0, "Lehmer cofactors keep the pair nonnegative");
        trim(&mut a);
        trim(&mut b);
        if a.len() < b.len() || (a.len() == b.len() && a.iter().rev().lt(b.iter().rev())) {
            std::mem::swap(&mut a, &mut b);
        }
    }
}

pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from(gcd_uint(a.magnitude(), b.magnitude()))
}

fn is_unit(n: &BigInt) -> bool {
    n.magnitude().is_one()
}

/// Exact quotient; `d` is positive.
fn div_exact(n: &BigInt, d: &BigInt) -> BigInt {
    if d.is_one() {
        n.clone()
    } else {
        n / d
    }
}

pub fn mul(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() || b.is_zero() {
        return BigRational::zero();
    }
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    let g1 = if is_unit(a.numer()) || b.denom().is_one() { BigInt::one() } else { gcd(a.numer(), b.denom()) };
    let g2 = if is_unit(b.numer()) || a.denom().is_one() { BigInt::one() } else { gcd(b.numer(), a.denom()) };
    let numer = div_exact(a.numer(), &g1) * div_exact(b.numer(), &g2);
    let denom = div_exact(a.denom(), &g2) * div_exact(b.denom(), &g1);
    BigRational::new_raw(numer, denom)
}

pub fn add(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let (an, ad, bn, bd) = (a.numer(), a.denom(), b.numer(), b.denom());
    if ad.is_one() && bd.is_one() {
        return BigRational::from_integer(an + bn);
    }
    if ad == bd {
        let n = an + bn;
        return reduce_by(n, ad);
    }
    let g = if ad.is_one() || bd.is_one() { BigInt::one() } else { gcd(ad, bd) };
    if g.is_one() {
        // coprime denominators leave nothing to cancel
        return BigRational::new_raw(an * bd + bn * ad, ad * bd);
    }
    let (adg, bdg) = (ad / &g, bd / &g);
    let t = an * &bdg + bn * &adg;
    if t.is_zero() {
        return BigRational::zero();
    }
    let g2 = gcd(&t, &g);
    BigRational::new_raw(div_exact(&t, &g2), adg * div_exact(bd, &g2))
}

/// `n / d` in lowest terms, `d > 0`.
pub fn reduce_by(n: BigInt, d: &BigInt) -> BigRational {
    if n.is_zero() {
        return BigRational::zero();
    }
    let g = gcd(&n, d);
    BigRational::new_raw(div_exact(&n, &g), div_exact(d, &g))
}

/// `n / (f_1 ⋯ f_r)` in lowest terms, all `f_i > 0`. Cancelling factor by
/// factor keeps the gcd operands as small as the factors.
pub fn reduce_by_factors(n: BigInt, factors: &[BigInt]) -> BigRational {
    if n.is_zero() {
        return BigRational::zero();
    }
    let mut n = n;
    let mut den = BigInt::one();
    // After dividing n by g = gcd(n, f), any factor n still shares with f
    // also divides g, so a repeated f only needs gcd(n, g).
    let mut last: Option<(&BigInt, BigInt)> = None;
    for f in factors {
        let g = match &last {
            Some((prev, g)) if *prev == f => {
                if g.is_one() {
                    den *= f;
                    continue;
                }
                gcd(&n, g)
            }
            _ => gcd(&n, f),
        };
        n = div_exact(&n, &g);
        den *= div_exact(f, &g);
        last = Some((f, g));
    }
    BigRational::new_raw(n, den)
}

pub fn neg(a: &BigRational) -> BigRational {
    BigRational::new_raw(-a.numer(), a.denom().clone())
}

pub fn sub(a: &BigRational, b: &BigRational) -> BigRational {
    if b.is_zero() {
        return a.clone();
    }
    add(a, &neg(b))
}

/// Reciprocal of a nonzero rational.
pub fn recip(a: &BigRational) -> BigRational {
    match a.numer().sign() {
        Sign::Minus => BigRational::new_raw(-a.denom(), -a.numer()),
        _ => BigRational::new_raw(a.denom().clone(), a.numer().clone()),
    }
}

pub fn div(a: &BigRational, b: &BigRational) -> BigRational {
    mul(a, &recip(b))
}

/// `lcm` of positive integers, for clearing denominators.
pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() || a == b {
        return a.clone();
    }
    let g = gcd(a, b);
    a / &g * b
}

/// [`lcm`] in the shape `fold` wants.
pub fn lcm_ref(a: BigInt, b: &BigInt) -> BigInt {
    lcm(&a, b)
}
