//! Implicit-function solve for `s(x, f(x)) = 0`.

use num_traits::Zero;

use super::bivariate::TruncSeries2;
use super::puiseux::{substitute_y, PuiseuxSeries1};
use super::SeriesError;

/// Solves `s(x, f(x)) = 0` for `f` by undetermined coefficients.
///
/// Requires `s(0, 0) = 0` and `ds/dy(0, 0) != 0`. The result is exact through `x^K`
/// where `K` is the order of `s`.
pub fn solve_implicit(s: &TruncSeries2) -> Result<PuiseuxSeries1, SeriesError> {
    if !s.coeff(0, 0).is_zero() {
        return Err(SeriesError::NotSolvable("s(0,0) is not zero".into()));
    }
    let c = s.coeff(0, 1);
    if c.is_zero() {
        return Err(SeriesError::NotSolvable("ds/dy vanishes at the origin".into()));
    }
    let order = s.order();
    let mut rest = s.clone();
    rest.add_term(0, 1, -c.clone());
    let prec = order as i64 + 1;
    let mut f = PuiseuxSeries1::integral(std::iter::empty(), prec);
    for _ in 0..order {
        let r = substitute_y(&rest, &f)?;
        let next = PuiseuxSeries1::integral(r.terms().map(|(p, v)| (p, -v.clone() / &c)), prec);
        if next == f {
            break;
        }
        f = next;
    }
    Ok(f)
}
