//! Unit-time map by Picard iteration, the characteristic map and its dimension.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::series::coeff::format_rational;
use crate::series::{substitute_y, PuiseuxSeries1, SeriesError, TPoly, TPolySeries2, TruncSeries2};
use crate::system_model::{CharData, PlanarSystem};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum UnitTimeError {
    #[error("requested order {requested} exceeds the system truncation order {available}")]
    OrderTooHigh { requested: u32, available: u32 },
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("characteristic map is the identity through order {0}: dimension 0 or undetermined at this order")]
    Undetermined(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Taylor expansion of the time-one map, exact through total degree `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitTimeMap {
    pub u1: TruncSeries2,
    pub u2: TruncSeries2,
    pub order: u32,
}

impl UnitTimeMap {
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (self.u1.eval(x, y), self.u2.eval(x, y))
    }

    pub fn to_json(&self) -> Value {
        let terms = |s: &TruncSeries2| {
            s.terms().map(|(i, j, c)| json!([i, j, format_rational(c)])).collect::<Vec<_>>()
        };
        json!({"order": self.order, "U1": terms(&self.u1), "U2": terms(&self.u2)})
    }
}

/// Time-one map of `x' = s*y + A`, `y' = B` with `s = +-1`.
fn picard(a: &TruncSeries2, b: &TruncSeries2, s: i64, k_u: u32) -> UnitTimeMap {
    let sgn = BigRational::from_integer(s.into());
    let lift = |p: &TruncSeries2, order: u32| p.truncate(order).map_coeffs(|c| TPoly::constant(c.clone())).with_order(order);
    let t = TPoly::monomial(1, BigRational::one());
    let lin_x = |order: u32| {
        TPolySeries2::from_terms(
            [(1, 0, TPoly::constant(BigRational::one())), (0, 1, t.clone() * TPoly::constant(sgn.clone()))],
            order,
        )
    };
    let mut xs = lin_x(1);
    let mut ys = TPolySeries2::y(1);
    // Iteration j is exact through degree j + 1, so it is carried out at that order.
    for j in 1..k_u {
        let order = j + 1;
        let xo = xs.with_order(order);
        let yo = ys.with_order(order);
        let n1 = lift(a, order).compose(&xo, &yo);
        let n2 = lift(b, order).compose(&xo, &yo);
        let mut nx = lin_x(order);
        let mut ny = TPolySeries2::y(order);
        for (i, k, c) in n1.terms() {
            nx.add_term(i, k, c.integrate());
        }
        for (i, k, c) in n2.terms() {
            nx.add_term(i, k, c.integrate_kernel() * TPoly::constant(sgn.clone()));
            ny.add_term(i, k, c.integrate());
        }
        xs = nx;
        ys = ny;
    }
    let at_one = |p: &TPolySeries2| {
        let mut out = TruncSeries2::zero(k_u);
        for (i, k, c) in p.terms() {
            out.add_term(i, k, c.eval_one());
        }
        out
    };
    UnitTimeMap { u1: at_one(&xs), u2: at_one(&ys), order: k_u }
}

/// Time-one map of the system, exact through degree `k_u`.
pub fn picard_unit_time(sys: &PlanarSystem, k_u: u32) -> Result<UnitTimeMap, UnitTimeError> {
    check_order(sys, k_u)?;
    Ok(picard(&sys.a_part(), &sys.b_part(), 1, k_u))
}

/// Time-minus-one map (the time-one map of the reversed field).
pub fn picard_inverse_map(sys: &PlanarSystem, k_u: u32) -> Result<UnitTimeMap, UnitTimeError> {
    check_order(sys, k_u)?;
    Ok(picard(&(-&sys.a_part()), &(-&sys.b_part()), -1, k_u))
}

fn check_order(sys: &PlanarSystem, k_u: u32) -> Result<(), UnitTimeError> {
    if k_u == 0 {
        return Err(UnitTimeError::ZeroOrder);
    }
    if k_u > sys.order() {
        return Err(UnitTimeError::OrderTooHigh { requested: k_u, available: sys.order() });
    }
    Ok(())
}

/// Restriction of `U1` to the characteristic curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CharMap {
    pub ch: PuiseuxSeries1,
    /// Lowest exponent of `C_h(x) - x`.
    pub leading_exp: Option<u32>,
    pub leading_coeff: Option<BigRational>,
}

impl CharMap {
    pub fn to_json(&self) -> Value {
        json!({
            "terms": self.ch.terms().map(|(p, c)| json!([p, format_rational(c)])).collect::<Vec<_>>(),
            "valid_below_exponent": self.ch.prec_num(),
            "leading_exp": self.leading_exp,
            "leading_coeff": self.leading_coeff.as_ref().map(format_rational),
        })
    }
}

pub fn characteristic_map(u: &UnitTimeMap, f: &PuiseuxSeries1) -> Result<CharMap, UnitTimeError> {
    let mut g = u.u1.clone();
    g.add_term(1, 0, -BigRational::one());
    let delta = substitute_y(&g, f)?;
    let lead = delta.lowest().map(|(p, c)| (p as u32, c.clone()));
    let mut ch = delta;
    ch.add_term(1, BigRational::one());
    let (leading_exp, leading_coeff) = lead.unzip();
    Ok(CharMap { ch, leading_exp, leading_coeff })
}

/// `1 - 1/mu` for the leading exponent `mu` of `C_h(x) - x`.
pub fn characteristic_dimension(cm: &CharMap) -> Result<BigRational, UnitTimeError> {
    match cm.leading_exp {
        Some(mu) if mu > 1 => Ok(BigRational::one() - BigRational::new(1.into(), (mu as i64).into())),
        Some(_) => Ok(BigRational::zero()),
        None => Err(UnitTimeError::Undetermined(cm.ch.precision().to_string())),
    }
}

/// Default order of the Picard expansion: enough to see `x^m` on the curve.
pub fn default_unit_order(sys: &PlanarSystem, cd: &CharData) -> u32 {
    let want = match cd.m {
        Some(m) => m + 2,
        None => sys.order(),
    };
    want.min(sys.order()).max(2)
}

/// Structural facts about the unit-time map of `x' = y`, `y' = B`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureCheck {
    pub applicable: bool,
    pub case: &'static str,
    pub holds: bool,
    pub detail: String,
}

/// Checks the vanishing pattern of the low-order terms of `U` for systems with `A = 0`.
pub fn structure_check(sys: &PlanarSystem, cd: &CharData, u: &UnitTimeMap) -> StructureCheck {
    let na = |detail: &str| StructureCheck { applicable: false, case: "n/a", holds: true, detail: detail.into() };
    if !sys.a_part().is_zero() {
        return na("x' is not exactly y");
    }
    let Some(m) = cd.m else { return na("F vanishes to the working order") };
    let n_plus = cd.n.map(|n| n + 1);
    let mut lin1 = u.u1.clone();
    lin1.add_term(1, 0, -BigRational::one());
    lin1.add_term(0, 1, -BigRational::one());
    let mut lin2 = u.u2.clone();
    lin2.add_term(0, 1, -BigRational::one());
    if n_plus.is_none_or(|np| m <= np) {
        let top = (m - 1).min(u.order);
        let bad: Vec<String> = [(&lin1, "U1"), (&lin2, "U2")]
            .iter()
            .flat_map(|(s, name)| {
                s.terms().filter(|&(i, j, _)| i + j >= 2 && i + j <= top).map(move |(i, j, _)| format!("{name}: x^{i} y^{j}"))
            })
            .collect();
        StructureCheck {
            applicable: true,
            case: "m <= n+1",
            holds: bad.is_empty(),
            detail: if bad.is_empty() { format!("no nonlinear terms below degree {m}") } else { bad.join(", ") },
        }
    } else {
        let np = n_plus.unwrap_or(0).min(u.order);
        let bad: Vec<u32> = (2..=np).filter(|&j| !lin2.coeff(j, 0).is_zero()).collect();
        StructureCheck {
            applicable: true,
            case: "m > n+1",
            holds: bad.is_empty(),
            detail: if bad.is_empty() {
                format!("U2 - y has no pure x^j terms for j <= {}", np)
            } else {
                format!("U2 - y contains x^j for j in {bad:?}")
            },
        }
    }
}

/// Warning when `deg(B) + 2 > max(m, n+1)` fails.
pub fn degree_warning(sys: &PlanarSystem, cd: &CharData) -> Option<String> {
    let m = cd.m?;
    let need = m.max(cd.n.map_or(0, |n| n + 1));
    let deg = sys.degree_b();
    if deg + 2 > need {
        None
    } else {
        Some(format!("deg(B) + 2 = {} does not exceed max(m, n+1) = {need}; the low-order form of the unit-time map may not apply", deg + 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff::{int, rat};

    fn sys(xdot: &[(u32, u32, i64)], ydot: &[(u32, u32, i64)], k: u32) -> PlanarSystem {
        let conv = |v: &[(u32, u32, i64)]| v.iter().map(|&(i, j, c)| (i, j, int(c))).collect::<Vec<_>>();
        PlanarSystem::from_terms(&conv(xdot), &conv(ydot), Some(k)).unwrap()
    }

    #[test]
    fn linear_flow_is_exact() {
        let s = sys(&[(0, 1, 1)], &[], 6);
        let u = picard_unit_time(&s, 6).unwrap();
        assert_eq!(u.u1, TruncSeries2::from_terms([(1, 0, int(1)), (0, 1, int(1))], 6));
        assert_eq!(u.u2, TruncSeries2::y(6));
    }

    #[test]
    fn order_is_bounded_by_truncation() {
        let s = sys(&[(0, 1, 1)], &[(2, 0, 1)], 4);
        assert_eq!(
            picard_unit_time(&s, 5),
            Err(UnitTimeError::OrderTooHigh { requested: 5, available: 4 })
        );
    }

    #[test]
    fn pure_power_terms() {
        let s = sys(&[(0, 1, 1)], &[(3, 0, 3)], 5);
        let u = picard_unit_time(&s, 5).unwrap();
        assert_eq!(u.u1.coeff(3, 0), rat(3, 2));
        assert_eq!(u.u2.coeff(3, 0), int(3));
    }

    #[test]
    fn cusp_characteristic_map() {
        let s = sys(&[(0, 1, 1)], &[(2, 0, 1), (1, 1, 1)], 6);
        let cd = s.char_data().unwrap();
        let u = picard_unit_time(&s, 4).unwrap();
        let cm = characteristic_map(&u, &cd.f).unwrap();
        assert_eq!(cm.leading_exp, Some(2));
        assert_eq!(cm.leading_coeff, Some(rat(1, 2)));
        assert_eq!(characteristic_dimension(&cm).unwrap(), rat(1, 2));
    }

    #[test]
    fn inverse_composes_to_identity() {
        let s = sys(&[(0, 1, 1), (2, 0, 1)], &[(3, 0, -2), (1, 1, -2)], 6);
        let k = 6;
        let u = picard_unit_time(&s, k).unwrap();
        let v = picard_inverse_map(&s, k).unwrap();
        let c1 = v.u1.compose(&u.u1, &u.u2);
        let c2 = v.u2.compose(&u.u1, &u.u2);
        assert_eq!(c1, TruncSeries2::x(k));
        assert_eq!(c2, TruncSeries2::y(k));
    }

    #[test]
    fn identity_map_is_undetermined() {
        let s = sys(&[(0, 1, 1)], &[], 4);
        let u = picard_unit_time(&s, 4).unwrap();
        let cm = characteristic_map(&u, &PuiseuxSeries1::integral(std::iter::empty(), 5)).unwrap();
        assert!(matches!(characteristic_dimension(&cm), Err(UnitTimeError::Undetermined(_))));
    }

    #[test]
    fn example_two_characteristic_map() {
        let s = sys(&[(0, 1, 1), (2, 0, 1), (1, 2, 1)], &[(3, 0, -2), (1, 1, -2), (0, 3, 2)], 20);
        let cd = s.char_data().unwrap();
        let start = std::time::Instant::now();
        let u = picard_unit_time(&s, 12).unwrap();
        let cm = characteristic_map(&u, &cd.f).unwrap();
        eprintln!("picard K_u=12 took {:?}", start.elapsed());
        assert_eq!(cm.leading_exp, Some(9));
        assert_eq!(cm.leading_coeff, Some(int(-1)));
        for p in [10, 11] {
            assert_eq!(cm.ch.coeff(p), int(0));
        }
        assert!(cm.ch.prec_num() >= 13);
        assert_eq!(characteristic_dimension(&cm).unwrap(), rat(8, 9));
    }
}
