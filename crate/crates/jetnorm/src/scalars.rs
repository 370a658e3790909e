//! Exact scalars over ℚ and the Gaussian rationals ℚ(i).
//!
//! A [`Scalar`] always carries a real and an imaginary rational part; over ℚ
//! the imaginary part is simply zero. Which field a computation lives in is
//! decided once, at configuration time, through [`Field`].

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ratarith as q;

/// Coefficient field of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    /// The rationals ℚ.
    #[default]
    Rational,
    /// The Gaussian rationals ℚ(i).
    Gaussian,
}

impl Field {
    /// Whether `s` belongs to this field.
    pub fn contains(self, s: &Scalar) -> bool {
        match self {
            Field::Rational => s.is_real(),
            Field::Gaussian => true,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Rational => "rational",
            Field::Gaussian => "gaussian",
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rational" | "q" | "rationals" => Ok(Field::Rational),
            "gaussian" | "q(i)" | "gaussian-rational" => Ok(Field::Gaussian),
            other => Err(Error::InvalidInput(format!(
                "unsupported field '{other}': only 'rational' and 'gaussian' are available"
            ))),
        }
    }
}

/// An exact element `re + im·i` of ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Scalar { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::real(BigRational::from_integer(n))
    }

    /// `num/den` as a real scalar. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Scalar {
        if self.im.is_zero() {
            return self.clone();
        }
        Scalar { re: self.re.clone(), im: -&self.im }
    }

    /// `s·conj(s)`, a nonnegative rational.
    pub fn norm(&self) -> BigRational {
        if self.im.is_zero() {
            q::mul(&self.re, &self.re)
        } else {
            q::add(&q::mul(&self.re, &self.re), &q::mul(&self.im, &self.im))
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Scalar::real(q::recip(&self.re)));
        }
        let n = q::recip(&self.norm());
        Some(Scalar { re: q::mul(&self.re, &n), im: q::neg(&q::mul(&self.im, &n)) })
    }

    /// Multiply by a rational without touching the imaginary part when it is zero.
    pub fn scale_rational(&self, r: &BigRational) -> Scalar {
        if self.im.is_zero() {
            Scalar::real(q::mul(&self.re, r))
        } else {
            Scalar { re: q::mul(&self.re, r), im: q::mul(&self.im, r) }
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::real(BigRational::one())
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::real(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn add(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::real(q::add(&self.re, &rhs.re));
        }
        Scalar { re: q::add(&self.re, &rhs.re), im: q::add(&self.im, &rhs.im) }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::real(q::sub(&self.re, &rhs.re));
        }
        Scalar { re: q::sub(&self.re, &rhs.re), im: q::sub(&self.im, &rhs.im) }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self.im.is_zero(), rhs.im.is_zero()) {
            (true, true) => Scalar::real(q::mul(&self.re, &rhs.re)),
            (true, false) => Scalar { re: q::mul(&self.re, &rhs.re), im: q::mul(&self.re, &rhs.im) },
            (false, true) => Scalar { re: q::mul(&self.re, &rhs.re), im: q::mul(&self.im, &rhs.re) },
            (false, false) => Scalar {
                re: q::sub(&q::mul(&self.re, &rhs.re), &q::mul(&self.im, &rhs.im)),
                im: q::add(&q::mul(&self.re, &rhs.im), &q::mul(&self.im, &rhs.re)),
            },
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    /// Panics on division by zero, like the underlying rationals.
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        if self.im.is_zero() {
            return Scalar::real(q::neg(&self.re));
        }
        Scalar { re: q::neg(&self.re), im: q::neg(&self.im) }
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re = q::add(&self.re, &rhs.re);
        if !rhs.im.is_zero() {
            self.im = q::add(&self.im, &rhs.im);
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re = q::sub(&self.re, &rhs.re);
        if !rhs.im.is_zero() {
            self.im = q::sub(&self.im, &rhs.im);
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// Canonical text: `p/q` for reals, `p/q+r/s*i` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return f.write_str(&fmt_rational(&self.re));
        }
        let im = if self.im.abs().is_one() { "1".to_string() } else { fmt_rational(&self.im.abs()) };
        if self.re.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "" };
            return write!(f, "{sign}{im}*i");
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(f, "{}{sign}{im}*i", fmt_rational(&self.re))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("malformed rational '{s}'"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in '{s}'")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts the canonical forms written by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix('i') else {
            return Ok(Scalar::real(parse_rational(s)?));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (parse_rational(&body[..k])?, &body[k..]),
            None => (BigRational::zero(), body),
        };
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(Scalar::new(re, im))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serialize a rational as its canonical `num/den` string.
pub fn rational_to_string(r: &BigRational) -> String {
    fmt_rational(r)
}

/// Serializes a rational as its exact text, for `#[serde(serialize_with)]`.
pub fn serialize_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

pub fn rational_from_str(s: &str) -> Result<BigRational> {
    parse_rational(s)
}

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
