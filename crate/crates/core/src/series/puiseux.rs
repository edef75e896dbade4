//! Univariate Puiseux series `sum c_p x^(p/d)` with tracked precision.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::bivariate::TruncSeries2;
use super::coeff::{format_rational, Field, Ring};
use super::SeriesError;

/// Known exactly for exponents below `prec / denom`; the rest is `O(x^(prec/denom))`.
#[derive(Clone, PartialEq)]
pub struct Puiseux<C> {
    denom: u32,
    terms: BTreeMap<i64, C>,
    prec: i64,
}

pub type PuiseuxSeries1 = Puiseux<BigRational>;

impl<C: Ring> Puiseux<C> {
    pub fn zero(denom: u32, prec: i64) -> Self {
        assert!(denom > 0);
        Puiseux { denom, terms: BTreeMap::new(), prec }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(denom: u32, terms: I, prec: i64) -> Self {
        let mut s = Self::zero(denom, prec);
        for (p, c) in terms {
            s.add_term(p, c);
        }
        s
    }

    /// Integer-exponent series with precision `O(x^prec)`.
    pub fn integral<I: IntoIterator<Item = (i64, C)>>(terms: I, prec: i64) -> Self {
        Self::from_terms(1, terms, prec)
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn prec_num(&self) -> i64 {
        self.prec
    }

    /// Exponent of the first unknown term.
    pub fn precision(&self) -> BigRational {
        ratio(self.prec, self.denom)
    }

    pub fn add_term(&mut self, p: i64, c: C) {
        if p >= self.prec || c.is_zero() {
            return;
        }
        let nv = match self.terms.remove(&p) {
            Some(v) => v + c,
            None => c,
        };
        if !nv.is_zero() {
            self.terms.insert(p, nv);
        }
    }

    pub fn coeff(&self, p: i64) -> C {
        self.terms.get(&p).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of `x^e` for an arbitrary rational exponent.
    pub fn coeff_at(&self, e: &BigRational) -> C {
        let scaled = e * BigRational::from_integer(BigInt::from(self.denom));
        if !scaled.is_integer() {
            return C::zero();
        }
        let p: i64 = num_traits::ToPrimitive::to_i64(&scaled.to_integer()).unwrap_or(i64::MAX);
        self.coeff(p)
    }

    /// `(numerator, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.terms.iter().map(|(&p, c)| (p, c))
    }

    /// `(exponent, coefficient)` pairs with reduced rational exponents.
    pub fn exponent_terms(&self) -> Vec<(BigRational, C)> {
        self.terms.iter().map(|(&p, c)| (ratio(p, self.denom), c.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lowest(&self) -> Option<(i64, &C)> {
        self.terms.iter().next().map(|(&p, c)| (p, c))
    }

    pub fn leading_exponent(&self) -> Option<BigRational> {
        self.lowest().map(|(p, _)| ratio(p, self.denom))
    }

    /// Lowest numerator, or the precision bound when no term is known.
    fn valuation(&self) -> i64 {
        self.lowest().map(|(p, _)| p).unwrap_or(self.prec)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        let terms = self.terms.range(..prec).map(|(&p, c)| (p, c.clone())).collect();
        Puiseux { denom: self.denom, terms, prec }
    }

    /// Rewrites over the denominator `d`, which must be a multiple of the current one.
    pub fn with_denom(&self, d: u32) -> Self {
        assert!(d.is_multiple_of(self.denom), "denominator {d} is not a multiple of {}", self.denom);
        let k = (d / self.denom) as i64;
        Puiseux {
            denom: d,
            terms: self.terms.iter().map(|(&p, c)| (p * k, c.clone())).collect(),
            prec: self.prec.saturating_mul(k),
        }
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        let d = (self.denom as u64).lcm(&(o.denom as u64)) as u32;
        (self.with_denom(d), o.with_denom(d))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        let mut s = a.truncate(a.prec.min(b.prec));
        for (p, c) in b.terms {
            s.add_term(p, c);
        }
        s
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut s = Self::zero(self.denom, self.prec);
        for (p, v) in self.terms() {
            s.add_term(p, v.clone() * c.clone());
        }
        s
    }

    /// Multiplies by `x^(p/denom)` in the current denominator.
    pub fn shift(&self, p: i64) -> Self {
        Puiseux {
            denom: self.denom,
            terms: self.terms.iter().map(|(&q, c)| (q + p, c.clone())).collect(),
            prec: self.prec.saturating_add(p),
        }
    }

    pub fn map_coeffs<D: Ring, F: Fn(&C) -> D>(&self, f: F) -> Puiseux<D> {
        let mut s = Puiseux::<D>::zero(self.denom, self.prec);
        for (p, v) in self.terms() {
            s.add_term(p, f(v));
        }
        s
    }

    /// Product; the precision follows from both factors' valuations.
    pub fn mul(&self, o: &Self) -> Self {
        self.mul_capped(o, i64::MAX)
    }

    /// Product with the precision additionally capped at `cap` (in the common denominator).
    pub fn mul_capped(&self, o: &Self, cap: i64) -> Self {
        let (a, b) = self.common(o);
        let prec = a
            .prec
            .saturating_add(b.valuation())
            .min(b.prec.saturating_add(a.valuation()))
            .min(cap);
        let mut s = Self::zero(a.denom, prec);
        for (p, x) in a.terms() {
            if p + b.valuation() >= prec {
                break;
            }
            for (q, y) in b.terms() {
                if p + q >= prec {
                    break;
                }
                s.add_term(p + q, x.clone() * y.clone());
            }
        }
        s
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::from_terms(self.denom, [(0, C::one())], i64::MAX / 4);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl<C: Field> Puiseux<C> {
    /// `d/dx`; fractional exponents carry their exact rational factor.
    pub fn derivative(&self) -> Self {
        let d = self.denom as i64;
        let mut s = Self::zero(self.denom, self.prec.saturating_sub(d));
        for (p, c) in self.terms() {
            if p != 0 {
                let factor = C::from_rational(&ratio(p, self.denom));
                s.add_term(p - d, c.clone() * factor);
            }
        }
        s
    }

    /// Numeric evaluation. Fractional exponents use `|x|` with the sign of `x` ignored.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (p, c) in self.terms() {
            let v = if self.denom == 1 {
                x.powi(p as i32)
            } else {
                x.abs().powf(p as f64 / self.denom as f64)
            };
            acc += c.to_f64() * v;
        }
        acc
    }

    /// `d/dx` evaluated numerically.
    pub fn eval_derivative(&self, x: f64) -> f64 {
        self.derivative().eval(x)
    }

    /// Lifts a rational series into this coefficient field.
    pub fn lift(q: &PuiseuxSeries1) -> Self {
        q.map_coeffs(C::from_rational)
    }
}

fn ratio(p: i64, d: u32) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

/// `s(x, f(x))` for a bivariate series `s` and a Puiseux series `f` with `f(0) = 0`.
///
/// The precision of the result accounts for the truncation of both `s` and `f`.
pub fn substitute_y<C: Field>(s: &TruncSeries2, f: &Puiseux<C>) -> Result<Puiseux<C>, SeriesError> {
    let d = f.denom() as i64;
    let ef = f.valuation();
    if ef <= 0 {
        return Err(SeriesError::NonPositiveExponent { exponent: ratio(ef, f.denom()).to_string() });
    }
    let order = s.order() as i64;
    let mut prec = (order + 1).saturating_mul(d.min(ef));
    for (i, j, _) in s.terms() {
        if j >= 1 {
            let bound = (i as i64 * d).saturating_add((j as i64 - 1) * ef).saturating_add(f.prec_num());
            prec = prec.min(bound);
        }
    }
    let f = f.truncate(prec);
    let maxj = s.max_y_degree() as usize;
    let mut pows: Vec<Puiseux<C>> = vec![Puiseux::from_terms(f.denom(), [(0, C::one())], prec)];
    for k in 1..=maxj {
        let next = pows[k - 1].mul_capped(&f, prec);
        pows.push(next);
    }
    let mut out = Puiseux::zero(f.denom(), prec);
    for (i, j, c) in s.terms() {
        let shift = i as i64 * d;
        if shift >= prec {
            continue;
        }
        let c = C::from_rational(c);
        for (p, v) in pows[j as usize].terms() {
            if p + shift >= prec {
                break;
            }
            out.add_term(p + shift, c.clone() * v.clone());
        }
    }
    Ok(out)
}

impl<C: Field + fmt::Display> fmt::Display for Puiseux<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let e = ratio(p, self.denom);
            if e.is_zero() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*x^{}", format_rational(&e))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", format_rational(&self.precision()))
    }
}

impl<C: fmt::Debug> fmt::Debug for Puiseux<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Puiseux[d={}, prec={}]{{", self.denom, self.prec)?;
        for (n, (p, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}: {c:?}")?;
        }
        write!(f, "}}")
    }
}
