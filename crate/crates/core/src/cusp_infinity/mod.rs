//! Separatrices of cusps and nodes, closed-form cusp dimensions and the behaviour at
//! infinity in the two Poincaré charts.

mod charts;
mod invariant;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

pub use charts::{chart1_transform, chart2_transform, infinity_analysis, ChartSystem, Chart1Point, Chart2Separatrix, InfinityAnalysis};

use crate::classifier::{Kind, SingularityClass};
use crate::fractal::{curve_orbit, Approach, Engine, OrbitOptions, OrbitSample};
use crate::ode::{PolyField, State};
use crate::series::coeff::{format_rational, rational_to_f64};
use crate::series::{Puiseux, QuadSurd, SeriesError, TruncSeries2};
use crate::system_model::{CharData, ModelError, PlanarSystem};
use crate::unit_time::{picard_inverse_map, picard_unit_time, UnitTimeError};

#[derive(Debug, thiserror::Error)]
pub enum CuspError {
    #[error("no separatrix series for a {0:?}")]
    UnsupportedKind(Kind),
    #[error("no real node direction: discriminant {0} < 0")]
    NoRealRoot(String),
    #[error("degenerate balance: {0}")]
    Degenerate(String),
    #[error("cusp dimensions need an even m >= 2, got {0}")]
    OddOrder(u32),
    #[error("system is not of the form x' = y, y' = a x^m + b x^n y: {0}")]
    NotCuspForm(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    UnitTime(#[from] UnitTimeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Stable,
    Unstable,
    /// Index of the leading-coefficient root for node directions.
    NodeRoot(usize),
}

/// An invariant curve through the origin.
///
/// The series are in the variable `s = side * x >= 0` of the frame where the cusp
/// coefficient is positive; `side = -1` means the system was reflected through the origin.
#[derive(Clone, Debug)]
pub struct Separatrix {
    pub branch: Branch,
    /// `v = g(u)` relative to the characteristic curve.
    pub flat: Puiseux<QuadSurd>,
    /// `y = f(x) + g(x)`.
    pub curve: Puiseux<QuadSurd>,
    /// Leading exponent of `g`.
    pub gamma: BigRational,
    pub side: f64,
    /// `u' ~ k u^sigma` along the curve, as `(k, sigma)` in the frame of `side`.
    pub speed: (f64, f64),
    pub residual_valuation: Option<BigRational>,
    pub residual_precision: BigRational,
    pub warnings: Vec<String>,
    char_curve: crate::series::PuiseuxSeries1,
}

impl Separatrix {
    pub fn leading_coefficient(&self) -> QuadSurd {
        self.flat.lowest().map(|(_, c)| c.clone()).unwrap_or_else(QuadSurd::zero)
    }

    /// Point of the curve at parameter `s`, in the original coordinates.
    pub fn point(&self, s: f64) -> State {
        [self.side * s, self.side * self.curve.eval(s)]
    }

    /// Maps an original point to `(u, v)`: reflected if needed, then flattened.
    pub fn to_flat(&self, p: State) -> State {
        let u = self.side * p[0];
        [u, self.side * p[1] - self.char_curve.eval(u)]
    }

    /// Index `k` of the first nonzero correction `x^((p0 + k)/d)` after the leading term.
    pub fn first_correction_index(&self) -> Option<u32> {
        let mut it = self.flat.terms();
        let (p0, _) = it.next()?;
        it.next().map(|(p, _)| (p - p0) as u32)
    }

    pub fn to_json(&self) -> Value {
        let terms = |p: &Puiseux<QuadSurd>| {
            p.exponent_terms()
                .iter()
                .map(|(e, c)| json!({"exponent": format_rational(e), "coeff": c.to_string(), "value": crate::series::Field::to_f64(c)}))
                .collect::<Vec<_>>()
        };
        json!({
            "branch": self.branch,
            "side": self.side,
            "gamma": format_rational(&self.gamma),
            "leading_coefficient": self.leading_coefficient().to_string(),
            "flat_series": terms(&self.flat),
            "curve_series": terms(&self.curve),
            "valid_below_exponent": format_rational(&self.curve.precision()),
            "residual_valuation": self.residual_valuation.as_ref().map(format_rational),
            "residual_precision": format_rational(&self.residual_precision),
            "speed": {"coeff": self.speed.0, "exponent": self.speed.1},
            "warnings": self.warnings,
        })
    }
}

/// `(x, y) -> (-x, -y)` applied to the field.
fn reflect(sys: &PlanarSystem) -> Result<PlanarSystem, ModelError> {
    let flip = |s: &TruncSeries2| {
        TruncSeries2::from_terms(
            s.terms().map(|(i, j, c)| (i, j, if (i + j) % 2 == 0 { -c.clone() } else { c.clone() })),
            s.order(),
        )
    };
    PlanarSystem::new(flip(sys.xdot_poly()), flip(sys.ydot_poly()), Some(sys.order()))
}

/// Separatrices (cusp) or node directions, solved as far as the truncation order allows.
///
/// `max_exponent` caps the exponents computed; `None` uses the working order.
pub fn separatrix_series(sys: &PlanarSystem, cd: &CharData, class: &SingularityClass, max_exponent: Option<u32>) -> Result<Vec<Separatrix>, CuspError> {
    let (m, a) = match (cd.m, &cd.a) {
        (Some(m), Some(a)) => (m, a.clone()),
        _ => return Err(CuspError::UnsupportedKind(class.kind)),
    };
    let cap = max_exponent.unwrap_or(sys.order() + 1) as i64;
    match class.kind {
        Kind::Cusp => {
            let (frame, side, a) = if a.is_negative() { (reflect(sys)?, -1.0, -a) } else { (sys.clone(), 1.0, a) };
            let c = QuadSurd::sqrt(&(BigRational::from_integer(2.into()) * a / BigRational::from_integer((m + 1).into())))
                .expect("positive radicand");
            let mut out = Vec::new();
            for (branch, c0) in [(Branch::Unstable, c.clone()), (Branch::Stable, -c.clone())] {
                out.push(solve_branch(&frame, branch, side, 2, (m + 1) as i64, c0, cap)?);
            }
            Ok(out)
        }
        Kind::Node | Kind::EllipticHyperbolic => {
            let (n, b) = match (cd.n, &cd.b) {
                (Some(n), Some(b)) => (n, b.clone()),
                _ => return Err(CuspError::UnsupportedKind(class.kind)),
            };
            let n1 = BigRational::from_integer((n + 1).into());
            let mut leads: Vec<(i64, QuadSurd)> = Vec::new();
            if m == 2 * n + 1 {
                let disc = &b * &b + BigRational::from_integer(4.into()) * &a * &n1;
                if disc.is_negative() {
                    return Err(CuspError::NoRealRoot(format_rational(&disc)));
                }
                let two_n1 = BigRational::from_integer(2.into()) * &n1;
                let root = QuadSurd::sqrt(&disc).expect("non-negative");
                let base = QuadSurd::rational(b.clone() / &two_n1);
                let half = root / QuadSurd::rational(two_n1);
                leads.push(((n + 1) as i64, base.clone() + half.clone()));
                if !disc.is_zero() {
                    leads.push(((n + 1) as i64, base - half));
                }
            } else {
                leads.push(((n + 1) as i64, QuadSurd::rational(b.clone() / &n1)));
                leads.push(((m - n) as i64, QuadSurd::rational(-a / &b)));
            }
            leads
                .into_iter()
                .enumerate()
                .map(|(k, (p0, c0))| solve_branch(sys, Branch::NodeRoot(k), 1.0, 1, p0, c0, cap.max(p0 + 1)))
                .collect()
        }
        k => Err(CuspError::UnsupportedKind(k)),
    }
}

fn solve_branch(frame: &PlanarSystem, branch: Branch, side: f64, d: u32, p0: i64, c0: QuadSurd, cap: i64) -> Result<Separatrix, CuspError> {
    let flat_sys = frame.flatten()?;
    let sol = invariant::solve_invariant_curve(&flat_sys.xdot(), &flat_sys.ydot(), d, p0, c0, cap * d as i64)?;
    let f = frame.char_data()?.f;
    let curve = Puiseux::<QuadSurd>::lift(&f).with_denom(d).add(&sol.series);
    Ok(Separatrix {
        branch,
        gamma: BigRational::new(p0.into(), (d as i64).into()),
        side,
        speed: (crate::series::Field::to_f64(&sol.speed.0), rational_to_f64(&sol.speed.1)),
        residual_valuation: sol.residual_valuation,
        residual_precision: sol.residual_precision,
        warnings: sol.warnings,
        flat: sol.series,
        curve,
        char_curve: f,
    })
}

/// `(dim S_x, dim S_y, dim S)` for an orbit on a cusp separatrix of multiplicity `m`.
pub fn cusp_dimensions(m: u32) -> Result<[BigRational; 3], CuspError> {
    if m % 2 == 1 || m < 2 {
        return Err(CuspError::OddOrder(m));
    }
    let one = BigRational::one();
    let m1 = BigRational::from_integer((m + 1).into());
    let sx = &one - BigRational::from_integer(2.into()) / &m1;
    let sy = &one - m1 / BigRational::from_integer((2 * m).into());
    Ok([sx.clone(), sy, sx])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitMode {
    NumericalFlow,
    TruncatedMap,
}

/// Unit-time orbit along a separatrix from `|x| = x0` toward the origin, in original
/// coordinates.
///
/// Node directions attract nearby orbits on the way in and are iterated directly; cusp
/// separatrices repel them, so their orbits are computed outward from a point close to
/// the origin and reversed.
pub fn separatrix_orbit(sys: &PlanarSystem, sep: &Separatrix, x0: f64, mode: OrbitMode, opts: &OrbitOptions) -> Result<OrbitSample, CuspError> {
    let approach = if sep.gamma.is_integer() { Approach::Inward } else { Approach::OutwardReverse };
    let field = PolyField::from_system(sys);
    let maps;
    let engine = match mode {
        OrbitMode::NumericalFlow => Engine::Flow(&field),
        OrbitMode::TruncatedMap => {
            let k = sys.order();
            maps = (picard_unit_time(sys, k)?, picard_inverse_map(sys, k)?);
            Engine::Maps { forward: &maps.0, inverse: &maps.1 }
        }
    };
    let (l, sigma) = sep.speed;
    // Cusp series live on s = |x| > 0 of their frame; node series take signed x, and an
    // odd exponent flips the velocity on the negative side.
    let (s0, k) = if sep.side < 0.0 || !sep.gamma.is_integer() {
        (x0.abs(), l)
    } else if x0 < 0.0 && (sigma as i64) % 2 == 1 {
        (x0, -l)
    } else {
        (x0, l)
    };
    let curve = |s: f64| sep.point(s);
    Ok(curve_orbit(&engine, &curve, s0, (k, sigma), approach, opts))
}
