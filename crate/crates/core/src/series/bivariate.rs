//! Truncated bivariate power series in `x`, `y`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::coeff::{format_rational, Field, Ring};
use super::tpoly::TPoly;

/// Series in `x`, `y` known exactly through total degree `order`; higher terms are discarded.
#[derive(Clone, PartialEq)]
pub struct Series2<C> {
    terms: BTreeMap<(u32, u32), C>,
    order: u32,
}

pub type TruncSeries2 = Series2<BigRational>;
pub type TPolySeries2 = Series2<TPoly>;

impl<C: Ring> Series2<C> {
    pub fn zero(order: u32) -> Self {
        Series2 { terms: BTreeMap::new(), order }
    }

    pub fn constant(c: C, order: u32) -> Self {
        Self::monomial(0, 0, c, order)
    }

    pub fn monomial(i: u32, j: u32, c: C, order: u32) -> Self {
        let mut s = Self::zero(order);
        s.add_term(i, j, c);
        s
    }

    pub fn x(order: u32) -> Self {
        Self::monomial(1, 0, C::one(), order)
    }

    pub fn y(order: u32) -> Self {
        Self::monomial(0, 1, C::one(), order)
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, u32, C)>>(terms: I, order: u32) -> Self {
        let mut s = Self::zero(order);
        for (i, j, c) in terms {
            s.add_term(i, j, c);
        }
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Adds `c x^i y^j`, dropping it if beyond the truncation order.
    pub fn add_term(&mut self, i: u32, j: u32, c: C) {
        if i + j > self.order || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(i, j)) {
            Some(v) => {
                let nv = v.clone() + c;
                if nv.is_zero() {
                    self.terms.remove(&(i, j));
                } else {
                    *v = nv;
                }
            }
            None => {
                self.terms.insert((i, j), c);
            }
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> C {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    pub fn get(&self, i: u32, j: u32) -> Option<&C> {
        self.terms.get(&(i, j))
    }

    /// Nonzero terms, lexicographic in `(i, j)`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &C)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn max_y_degree(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn max_x_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let terms = self
            .terms
            .iter()
            .filter(|(&(i, j), _)| i + j <= order)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        Series2 { terms, order }
    }

    /// Same terms, different bookkeeping order (used for exact polynomial input).
    pub fn with_order(&self, order: u32) -> Self {
        let mut s = Self::zero(order);
        for (i, j, c) in self.terms() {
            s.add_term(i, j, c.clone());
        }
        s
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(&(i, j), _)| i + j == d)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        Series2 { terms, order: self.order }
    }

    /// Terms of total degree at least `d`.
    pub fn tail_from(&self, d: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(&(i, j), _)| i + j >= d)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        Series2 { terms, order: self.order }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut s = Self::zero(self.order);
        for (i, j, v) in self.terms() {
            s.add_term(i, j, v.clone() * c.clone());
        }
        s
    }

    pub fn map_coeffs<D: Ring, F: Fn(&C) -> D>(&self, f: F) -> Series2<D> {
        let mut s = Series2::<D>::zero(self.order);
        for (i, j, v) in self.terms() {
            s.add_term(i, j, f(v));
        }
        s
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(C::one(), self.order);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplies by `x^a y^b`.
    pub fn shift(&self, a: u32, b: u32) -> Self {
        let mut s = Self::zero(self.order);
        for (i, j, v) in self.terms() {
            s.add_term(i + a, j + b, v.clone());
        }
        s
    }

    /// `self(p, q)`; `p` and `q` must vanish at the origin.
    pub fn compose(&self, p: &Self, q: &Self) -> Self {
        let order = self.order.min(p.order).min(q.order);
        debug_assert!(p.coeff(0, 0).is_zero() && q.coeff(0, 0).is_zero());
        let p = p.truncate(order);
        let q = q.truncate(order);
        let mut ppow = vec![Self::constant(C::one(), order)];
        for _ in 0..self.max_x_degree() {
            let next = &ppow[ppow.len() - 1] * &p;
            ppow.push(next);
        }
        let mut qpow = vec![Self::constant(C::one(), order)];
        for _ in 0..self.max_y_degree() {
            let next = &qpow[qpow.len() - 1] * &q;
            qpow.push(next);
        }
        let mut out = Self::zero(order);
        for (i, j, c) in self.terms() {
            let mono = &ppow[i as usize] * &qpow[j as usize];
            for (a, b, v) in mono.terms() {
                out.add_term(a, b, c.clone() * v.clone());
            }
        }
        out
    }

    /// Evaluation through a numeric embedding of the coefficients.
    pub fn eval_with<F: Fn(&C) -> f64>(&self, x: f64, y: f64, to_f64: F) -> f64 {
        let mut acc = 0.0;
        for (i, j, c) in self.terms() {
            acc += to_f64(c) * x.powi(i as i32) * y.powi(j as i32);
        }
        acc
    }
}

impl<C: Field> Series2<C> {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_with(x, y, |c| c.to_f64())
    }

    /// Partial derivative in `x`. The result is only known through `order - 1`.
    pub fn partial_x(&self) -> Self {
        let mut s = Self::zero(self.order.saturating_sub(1));
        for (i, j, v) in self.terms() {
            if i > 0 {
                s.add_term(i - 1, j, v.clone() * C::from_int(i as i64));
            }
        }
        s
    }

    /// Partial derivative in `y`. The result is only known through `order - 1`.
    pub fn partial_y(&self) -> Self {
        let mut s = Self::zero(self.order.saturating_sub(1));
        for (i, j, v) in self.terms() {
            if j > 0 {
                s.add_term(i, j - 1, v.clone() * C::from_int(j as i64));
            }
        }
        s
    }
}

impl TruncSeries2 {
    pub fn to_f64_terms(&self) -> Vec<(u32, u32, f64)> {
        self.terms().map(|(i, j, c)| (i, j, Field::to_f64(c))).collect()
    }
}

impl<C: Ring> Add for &Series2<C> {
    type Output = Series2<C>;
    fn add(self, o: &Series2<C>) -> Series2<C> {
        let mut s = self.truncate(self.order.min(o.order));
        for (i, j, v) in o.terms() {
            s.add_term(i, j, v.clone());
        }
        s
    }
}

impl<C: Ring> Sub for &Series2<C> {
    type Output = Series2<C>;
    fn sub(self, o: &Series2<C>) -> Series2<C> {
        let mut s = self.truncate(self.order.min(o.order));
        for (i, j, v) in o.terms() {
            s.add_term(i, j, -v.clone());
        }
        s
    }
}

impl<C: Ring> Neg for &Series2<C> {
    type Output = Series2<C>;
    fn neg(self) -> Series2<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl<C: Ring> Mul for &Series2<C> {
    type Output = Series2<C>;
    fn mul(self, o: &Series2<C>) -> Series2<C> {
        let order = self.order.min(o.order);
        let mut s = Series2::zero(order);
        for (i, j, a) in self.terms() {
            if i + j > order {
                continue;
            }
            for (k, l, b) in o.terms() {
                if i + j + k + l <= order {
                    s.add_term(i + k, j + l, a.clone() * b.clone());
                }
            }
        }
        s
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<C: Ring> $tr for Series2<C> {
            type Output = Series2<C>;
            fn $m(self, o: Series2<C>) -> Series2<C> {
                (&self).$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<C: Ring> Neg for Series2<C> {
    type Output = Series2<C>;
    fn neg(self) -> Series2<C> {
        -&self
    }
}

impl<C: Ring + fmt::Debug> fmt::Debug for Series2<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series2[order {}]{{", self.order)?;
        for (n, (i, j, c)) in self.terms().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "x^{i}y^{j}: {c:?}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for TruncSeries2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 + O({})", self.order + 1);
        }
        let mut first = true;
        for (i, j, c) in self.terms() {
            let neg = c < &BigRational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match (i, j) {
                (0, 0) => String::new(),
                (i, 0) => power("x", i),
                (0, j) => power("y", j),
                (i, j) => format!("{}*{}", power("x", i), power("y", j)),
            };
            if mono.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), mono)?;
            }
        }
        write!(f, " + O({})", self.order + 1)
    }
}

fn power(v: &str, k: u32) -> String {
    if k == 1 {
        v.to_string()
    } else {
        format!("{v}^{k}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff::{int, rat};

    fn s(terms: &[(u32, u32, i64)], order: u32) -> TruncSeries2 {
        TruncSeries2::from_terms(terms.iter().map(|&(i, j, c)| (i, j, int(c))), order)
    }

    #[test]
    fn multiplication_truncates() {
        let a = s(&[(1, 0, 1), (0, 1, 1)], 3);
        let sq = &a * &a;
        assert_eq!(sq, s(&[(2, 0, 1), (1, 1, 2), (0, 2, 1)], 3));
        let cube = a.pow(4);
        assert!(cube.is_zero());
    }

    #[test]
    fn partials_lower_order() {
        let a = s(&[(0, 1, 1), (2, 0, 1), (1, 2, 1)], 4);
        let dy = a.partial_y();
        assert_eq!(dy, s(&[(0, 0, 1), (1, 1, 2)], 3));
        assert_eq!(a.partial_x(), s(&[(1, 0, 2), (0, 2, 1)], 3));
    }

    #[test]
    fn compose_with_shift() {
        // (y + x^2)(x, y - x^2) = y
        let a = s(&[(0, 1, 1), (2, 0, 1)], 6);
        let p = TruncSeries2::x(6);
        let q = s(&[(0, 1, 1), (2, 0, -1)], 6);
        assert_eq!(a.compose(&p, &q), TruncSeries2::y(6));
    }

    #[test]
    fn display_is_readable() {
        let a = TruncSeries2::from_terms(vec![(0, 1, int(1)), (2, 0, rat(-1, 2))], 3);
        assert_eq!(a.to_string(), "y - 1/2*x^2 + O(4)");
    }
}
