//! Order-by-order solution of the invariance equation `g' X(u, g) = Y(u, g)`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::CuspError;
use crate::series::{substitute_y, Field, Puiseux, TruncSeries2};

#[derive(Clone, Debug)]
pub(crate) struct CurveSolution<C> {
    pub series: Puiseux<C>,
    /// Lowest exponent left in the residual, or `None` if it vanishes to its precision.
    pub residual_valuation: Option<BigRational>,
    pub residual_precision: BigRational,
    /// `(coefficient, exponent)` of the leading term of `X` along the curve.
    pub speed: (C, BigRational),
    pub warnings: Vec<String>,
}

fn scale_of<C: Field>(p: &Puiseux<C>) -> f64 {
    p.terms().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max).max(1e-300)
}

/// Lowest term that is not negligible relative to the series' largest coefficient.
fn lead<C: Field>(p: &Puiseux<C>) -> Option<(i64, C)> {
    let sc = scale_of(p);
    p.terms().find(|(_, c)| !c.is_negligible(sc)).map(|(e, c)| (e, c.clone()))
}

fn ratio(p: i64, d: u32) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

fn residual<C: Field>(x: &TruncSeries2, y: &TruncSeries2, g: &Puiseux<C>) -> Result<Puiseux<C>, CuspError> {
    let xg = substitute_y(x, g)?;
    let yg = substitute_y(y, g)?;
    Ok(g.derivative().mul(&xg).sub(&yg))
}

/// Invariant curve `v = g(u) = c0 u^(p0/d) + ...` of `u' = X`, `v' = Y`, solved for exponents
/// below `max_num / d`.
///
/// A correction `c u^((p0+e)/d)` enters the residual linearly at exponent `(p0+e)/d + s`
/// with a factor `lambda(e)`, where `s` and `lambda` come from the leading terms of `X` and
/// of `g' X_v - Y_v` along the curve.
pub(crate) fn solve_invariant_curve<C: Field>(
    x: &TruncSeries2,
    y: &TruncSeries2,
    d: u32,
    p0: i64,
    c0: C,
    max_num: i64,
) -> Result<CurveSolution<C>, CuspError> {
    let di = d as i64;
    let g0 = Puiseux::from_terms(d, [(p0, c0)], max_num);
    let xg = substitute_y(x, &g0)?;
    let (sig, ell) = lead(&xg).ok_or_else(|| CuspError::Degenerate("X vanishes along the curve".into()))?;
    let w = g0.derivative().mul(&substitute_y(&x.partial_y(), &g0)?).sub(&substitute_y(&y.partial_y(), &g0)?);
    let (tau, omega) = lead(&w).unwrap_or((i64::MAX / 4, C::zero()));
    let s = (sig - di).min(tau);

    let r0 = residual(x, y, &g0)?;
    let sc = scale_of(&r0).max(ell.to_f64().abs());
    if let Some((e, c)) = lead(&r0) {
        if e <= p0 + s && !c.is_negligible(sc) {
            return Err(CuspError::Degenerate(format!(
                "leading term does not balance: residual at exponent {}",
                ratio(e, d)
            )));
        }
    }

    let lambda = |e: i64| {
        let mut l = C::zero();
        if sig - di == s {
            l = l + C::from_rational(&ratio(p0 + e, d)) * ell.clone();
        }
        if tau == s {
            l = l + omega.clone();
        }
        l
    };

    let mut g = g0;
    let mut warnings = Vec::new();
    let mut prec = max_num;
    for e in 1.. {
        if p0 + e >= max_num {
            break;
        }
        let r = residual(x, y, &g)?;
        let target = p0 + e + s;
        if target >= r.prec_num() {
            prec = p0 + e;
            break;
        }
        let rc = r.coeff(target);
        if rc.is_negligible(sc) {
            continue;
        }
        let l = lambda(e);
        if l.is_negligible(sc) {
            warnings.push(format!("resonance at exponent {} with nonzero residual: series truncated", ratio(p0 + e, d)));
            prec = p0 + e;
            break;
        }
        g.add_term(p0 + e, -(rc / l));
    }
    let series = g.truncate(prec);
    let r = residual(x, y, &series)?;
    let rsc = scale_of(&r).max(sc);
    let residual_valuation = r.terms().find(|(_, c)| !c.is_negligible(rsc)).map(|(e, _)| ratio(e, d));
    Ok(CurveSolution {
        residual_valuation,
        residual_precision: r.precision(),
        series,
        speed: (ell, ratio(sig, d)),
        warnings,
    })
}
