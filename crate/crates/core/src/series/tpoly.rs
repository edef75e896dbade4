//! Polynomials in the time variable with exact rational coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::coeff::int;

/// `sum c_p t^p`, stored densely without trailing zeros.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TPoly(Vec<BigRational>);

impl TPoly {
    pub fn constant(c: BigRational) -> Self {
        let mut p = TPoly(vec![c]);
        p.trim();
        p
    }

    pub fn monomial(p: usize, c: BigRational) -> Self {
        let mut v = vec![BigRational::zero(); p + 1];
        v[p] = c;
        let mut out = TPoly(v);
        out.trim();
        out
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    fn trim(&mut self) {
        while matches!(self.0.last(), Some(c) if c.is_zero()) {
            self.0.pop();
        }
    }

    /// `int_0^t h(tau) dtau`.
    pub fn integrate(&self) -> Self {
        let mut v = vec![BigRational::zero(); self.0.len() + 1];
        for (p, c) in self.0.iter().enumerate() {
            v[p + 1] = c / int(p as i64 + 1);
        }
        let mut out = TPoly(v);
        out.trim();
        out
    }

    /// `int_0^t (t - tau) h(tau) dtau`, using `int_0^t (t-tau) tau^p = t^(p+2)/((p+1)(p+2))`.
    pub fn integrate_kernel(&self) -> Self {
        let mut v = vec![BigRational::zero(); self.0.len() + 2];
        for (p, c) in self.0.iter().enumerate() {
            let p = p as i64;
            v[p as usize + 2] = c / int((p + 1) * (p + 2));
        }
        let mut out = TPoly(v);
        out.trim();
        out
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn eval_one(&self) -> BigRational {
        self.0.iter().fold(BigRational::zero(), |a, c| a + c)
    }
}

impl Zero for TPoly {
    fn zero() -> Self {
        TPoly(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl One for TPoly {
    fn one() -> Self {
        TPoly(vec![BigRational::one()])
    }
}

impl Add for TPoly {
    type Output = TPoly;
    fn add(self, o: TPoly) -> TPoly {
        let (mut long, short) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        for (p, c) in short.0.into_iter().enumerate() {
            long.0[p] += c;
        }
        long.trim();
        long
    }
}

impl Neg for TPoly {
    type Output = TPoly;
    fn neg(self) -> TPoly {
        TPoly(self.0.into_iter().map(|c| -c).collect())
    }
}

impl Sub for TPoly {
    type Output = TPoly;
    fn sub(self, o: TPoly) -> TPoly {
        self + (-o)
    }
}

impl Mul for TPoly {
    type Output = TPoly;
    fn mul(self, o: TPoly) -> TPoly {
        if self.0.is_empty() || o.0.is_empty() {
            return TPoly::zero();
        }
        let mut v = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (p, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (q, b) in o.0.iter().enumerate() {
                v[p + q] += a * b;
            }
        }
        let mut out = TPoly(v);
        out.trim();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff::rat;

    #[test]
    fn kernel_integral_matches_closed_form() {
        // int_0^t (t - tau) tau^2 dtau = t^4 / 12
        let h = TPoly::monomial(2, int(1));
        assert_eq!(h.integrate_kernel(), TPoly::monomial(4, rat(1, 12)));
        assert_eq!(h.integrate(), TPoly::monomial(3, rat(1, 3)));
    }

    #[test]
    fn arithmetic_round_trip() {
        let a = TPoly::constant(int(1)) + TPoly::monomial(1, int(2));
        let b = a.clone() * a.clone();
        assert_eq!(b.coeffs(), &[int(1), int(4), int(4)]);
        assert_eq!(b.eval(&rat(1, 2)), int(4));
        assert_eq!(b.eval_one(), int(9));
        assert!((b.clone() - b).is_zero());
    }
}
