//! Exact arithmetic in a quadratic field `Q(sqrt r)`.
//!
//! Separatrix leading coefficients are roots of quadratics with rational data, so
//! a single square root is enough to keep every later coefficient exact.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::coeff::{format_rational, rational_sqrt, rational_to_f64, Field};

/// `a + b * sqrt(r)` with `r` a positive non-square rational (or absent).
#[derive(Clone, Debug)]
pub struct QuadSurd {
    a: BigRational,
    b: BigRational,
    r: Option<BigRational>,
}

impl QuadSurd {
    pub fn rational(a: BigRational) -> Self {
        QuadSurd { a, b: BigRational::zero(), r: None }
    }

    /// `sqrt(q)`, reduced to a rational when `q` is a perfect square.
    ///
    /// Returns `None` for negative `q`.
    pub fn sqrt(q: &BigRational) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        if let Some(s) = rational_sqrt(q) {
            return Some(QuadSurd::rational(s));
        }
        // Pull square factors of numerator and denominator out of the radicand.
        let (num_out, num_in) = square_split(q.numer());
        let (den_out, den_in) = square_split(q.denom());
        // sqrt(p/q) = (no/do) * sqrt(ni/di) = (no/(do*di)) * sqrt(ni*di)
        let coeff = BigRational::new(num_out, den_out * &den_in);
        let radicand = BigRational::from_integer(num_in * den_in);
        Some(QuadSurd { a: BigRational::zero(), b: coeff, r: Some(radicand) })
    }

    pub fn new(a: BigRational, b: BigRational, r: &BigRational) -> Option<Self> {
        let s = QuadSurd::sqrt(r)?;
        Some(QuadSurd::rational(a) + QuadSurd::rational(b) * s)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> Option<&BigRational> {
        if self.b.is_zero() {
            None
        } else {
            self.r.as_ref()
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn conjugate(&self) -> Self {
        QuadSurd { a: self.a.clone(), b: -self.b.clone(), r: self.r.clone() }
    }

    fn norm(&self) -> BigRational {
        match self.radicand() {
            Some(r) => &self.a * &self.a - &self.b * &self.b * r,
            None => &self.a * &self.a,
        }
    }

    fn join(x: &Option<BigRational>, y: &Option<BigRational>) -> Option<BigRational> {
        match (x, y) {
            (Some(p), Some(q)) => {
                assert!(p == q, "mixing incompatible quadratic fields sqrt({p}) and sqrt({q})");
                Some(p.clone())
            }
            (Some(p), None) | (None, Some(p)) => Some(p.clone()),
            (None, None) => None,
        }
    }

    fn live_radicand(&self) -> Option<BigRational> {
        self.radicand().cloned()
    }
}

fn square_split(n: &num_bigint::BigInt) -> (num_bigint::BigInt, num_bigint::BigInt) {
    use num_bigint::BigInt;
    let mut rest = n.clone();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    // Trial division is fine: radicands here are small discriminants.
    while &p * &p <= rest && p < BigInt::from(100_000) {
        let sq = &p * &p;
        while (&rest % &sq).is_zero() {
            rest /= &sq;
            out *= &p;
        }
        p += 1;
    }
    (out, rest)
}

impl PartialEq for QuadSurd {
    fn eq(&self, other: &Self) -> bool {
        if self.a != other.a || self.b != other.b {
            return false;
        }
        self.b.is_zero() || self.r == other.r
    }
}

impl Zero for QuadSurd {
    fn zero() -> Self {
        QuadSurd::rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadSurd {
    fn one() -> Self {
        QuadSurd::rational(BigRational::one())
    }
}

impl Add for QuadSurd {
    type Output = QuadSurd;
    fn add(self, o: QuadSurd) -> QuadSurd {
        let r = QuadSurd::join(&self.live_radicand(), &o.live_radicand());
        QuadSurd { a: self.a + o.a, b: self.b + o.b, r }
    }
}

impl Sub for QuadSurd {
    type Output = QuadSurd;
    fn sub(self, o: QuadSurd) -> QuadSurd {
        self + (-o)
    }
}

impl Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd { a: -self.a, b: -self.b, r: self.r }
    }
}

impl Mul for QuadSurd {
    type Output = QuadSurd;
    fn mul(self, o: QuadSurd) -> QuadSurd {
        let r = QuadSurd::join(&self.live_radicand(), &o.live_radicand());
        let bb = &self.b * &o.b;
        let a = match &r {
            Some(rr) => &self.a * &o.a + bb * rr,
            None => &self.a * &o.a,
        };
        let b = &self.a * &o.b + &self.b * &o.a;
        QuadSurd { a, b, r }
    }
}

impl Div for QuadSurd {
    type Output = QuadSurd;
    fn div(self, o: QuadSurd) -> QuadSurd {
        let n = o.norm();
        assert!(!n.is_zero(), "division by zero in quadratic field");
        let num = self * o.conjugate();
        QuadSurd { a: num.a / &n, b: num.b / &n, r: num.r }
    }
}

impl Field for QuadSurd {
    fn from_rational(q: &BigRational) -> Self {
        QuadSurd::rational(q.clone())
    }
    fn to_f64(&self) -> f64 {
        let a = rational_to_f64(&self.a);
        match self.radicand() {
            Some(r) => a + rational_to_f64(&self.b) * rational_to_f64(r).sqrt(),
            None => a,
        }
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.radicand() {
            None => write!(f, "{}", format_rational(&self.a)),
            Some(r) => {
                let surd = if self.b.is_one() {
                    format!("sqrt({})", format_rational(r))
                } else {
                    format!("{}*sqrt({})", format_rational(&self.b), format_rational(r))
                };
                if self.a.is_zero() {
                    write!(f, "{surd}")
                } else {
                    write!(f, "{} + {}", format_rational(&self.a), surd)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff::{int, rat};

    #[test]
    fn perfect_squares_collapse() {
        let s = QuadSurd::sqrt(&rat(9, 16)).unwrap();
        assert_eq!(s.as_rational(), Some(&rat(3, 4)));
        assert!(QuadSurd::sqrt(&int(-1)).is_none());
    }

    #[test]
    fn square_of_root_is_rational() {
        let s = QuadSurd::sqrt(&rat(2, 3)).unwrap();
        let sq = s.clone() * s.clone();
        assert_eq!(sq, QuadSurd::rational(rat(2, 3)));
        assert!((s.to_f64() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn division_rationalises() {
        let s = QuadSurd::new(int(1), int(1), &int(2)).unwrap();
        let inv = QuadSurd::one() / s.clone();
        assert_eq!(inv.clone() * s, QuadSurd::one());
        assert!((inv.to_f64() - 1.0 / (1.0 + 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn extracts_square_factors() {
        let s = QuadSurd::sqrt(&int(12)).unwrap();
        assert_eq!(s.radicand(), Some(&int(3)));
        assert_eq!(s.surd_part(), &int(2));
        assert_eq!(s.to_string(), "2*sqrt(3)");
    }
}
