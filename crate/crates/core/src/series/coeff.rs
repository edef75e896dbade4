//! Coefficient rings used by the truncated series types.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Commutative ring with unit, enough for series arithmetic.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// A field that contains the rationals and can be evaluated numerically.
pub trait Field: Ring + Div<Output = Self> {
    fn from_rational(q: &BigRational) -> Self;
    fn to_f64(&self) -> f64;

    fn from_int(k: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(k)))
    }

    /// Zero for exact fields; below `1e-12 * scale` in magnitude for floats.
    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

impl Field for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl Field for f64 {
    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= 1e-12 * scale
    }
}

/// Converts without overflowing on huge numerators and denominators.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift > 0 {
        BigRational::new(q.numer().clone(), q.denom().clone() << (shift as usize))
    } else {
        BigRational::new(q.numer().clone() << ((-shift) as usize), q.denom().clone())
    };
    scaled.to_integer().to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"-0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (ip, fp) = body.split_once('.')?;
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", ip, fp);
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), fp.len());
    let q = BigRational::new(n, d);
    Some(if neg { -q } else { q })
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Exact k-th root of a rational, if one exists.
pub fn rational_root(q: &BigRational, k: u32) -> Option<BigRational> {
    if k == 0 {
        return None;
    }
    if k == 1 {
        return Some(q.clone());
    }
    let neg = q.is_negative();
    if neg && k.is_multiple_of(2) {
        return None;
    }
    let a = q.abs();
    let n = a.numer().nth_root(k);
    let d = a.denom().nth_root(k);
    if &num_traits::pow(n.clone(), k as usize) == a.numer()
        && &num_traits::pow(d.clone(), k as usize) == a.denom()
    {
        let r = BigRational::new(n, d);
        Some(if neg { -r } else { r })
    } else {
        None
    }
}
