//! Poincaré charts at infinity for `x' = y`, `y' = a x^m + b x^n y`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::invariant::{solve_invariant_curve, CurveSolution};
use super::CuspError;
use crate::fractal::{curve_orbit, Approach, Engine, OrbitOptions, OrbitSample};
use crate::ode::{PolyField, State};
use crate::series::coeff::{format_rational, rational_to_f64};
use crate::series::{Puiseux, TruncSeries2};
use crate::system_model::PlanarSystem;

/// Working order for substitutions into chart polynomials, which are exact.
const CHART_ORDER: u32 = 40;

/// A chart field after removal of the common monomial factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartSystem {
    pub udot: TruncSeries2,
    pub vdot: TruncSeries2,
    /// Exponents `(i, j)` of the monomial `u^i v^j` the Laurent field was divided by;
    /// negative entries mean multiplication.
    pub divided_by: (i64, i64),
}

type Laurent = BTreeMap<(i64, i64), BigRational>;

fn add(l: &mut Laurent, key: (i64, i64), c: BigRational) {
    let e = l.entry(key).or_insert_with(BigRational::zero);
    *e += c;
    if e.is_zero() {
        l.remove(&key);
    }
}

fn normalize(udot: Laurent, vdot: Laurent) -> ChartSystem {
    let keys = || udot.keys().chain(vdot.keys());
    let iu = keys().map(|k| k.0).min().unwrap_or(0);
    let iv = keys().map(|k| k.1).min().unwrap_or(0);
    let conv = |l: &Laurent| {
        TruncSeries2::from_terms(l.iter().map(|(&(i, j), c)| ((i - iu) as u32, (j - iv) as u32, c.clone())), CHART_ORDER)
    };
    ChartSystem { udot: conv(&udot), vdot: conv(&vdot), divided_by: (iu, iv) }
}

/// `x = u/v`, `y = 1/v`: `u' = v P - u v Q`, `v' = -v^2 Q`, then divided by the common monomial.
pub fn chart2_transform(sys: &PlanarSystem) -> ChartSystem {
    let mut ud = Laurent::new();
    let mut vd = Laurent::new();
    for (i, j, c) in sys.xdot_poly().terms() {
        let (i, j) = (i as i64, j as i64);
        add(&mut ud, (i, 1 - i - j), c.clone());
    }
    for (i, j, c) in sys.ydot_poly().terms() {
        let (i, j) = (i as i64, j as i64);
        add(&mut ud, (i + 1, 1 - i - j), -c.clone());
        add(&mut vd, (i, 2 - i - j), -c.clone());
    }
    normalize(ud, vd)
}

/// `x = 1/v`, `y = u/v`: `u' = v Q - u v P`, `v' = -v^2 P`, then divided by the common monomial.
pub fn chart1_transform(sys: &PlanarSystem) -> ChartSystem {
    let mut ud = Laurent::new();
    let mut vd = Laurent::new();
    for (i, j, c) in sys.xdot_poly().terms() {
        let (i, j) = (i as i64, j as i64);
        add(&mut ud, (j + 1, 1 - i - j), -c.clone());
        add(&mut vd, (j, 2 - i - j), -c.clone());
    }
    for (i, j, c) in sys.ydot_poly().terms() {
        let (i, j) = (i as i64, j as i64);
        add(&mut ud, (j, 1 - i - j), c.clone());
    }
    normalize(ud, vd)
}

fn uv_string(s: &TruncSeries2) -> String {
    let mut out = String::new();
    for (i, j, c) in s.terms() {
        let neg = c < &BigRational::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        out.push_str(if out.is_empty() { if neg { "-" } else { "" } } else if neg { " - " } else { " + " });
        let mut mono = Vec::new();
        for (name, e) in [("u", i), ("v", j)] {
            match e {
                0 => {}
                1 => mono.push(name.to_string()),
                e => mono.push(format!("{name}^{e}")),
            }
        }
        if mono.is_empty() || !mag.is_one() {
            mono.insert(0, format_rational(&mag));
        }
        out.push_str(&mono.join("*"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl ChartSystem {
    pub fn field(&self) -> PolyField {
        PolyField::from_series(&self.udot, &self.vdot)
    }

    /// `u -> -u`, used when a separatrix lies on the negative side.
    fn reflected_u(&self) -> ChartSystem {
        let flip = |s: &TruncSeries2, odd_sign: bool| {
            TruncSeries2::from_terms(
                s.terms().map(|(i, j, c)| (i, j, if (i % 2 == 1) == odd_sign { c.clone() } else { -c.clone() })),
                s.order(),
            )
        };
        ChartSystem { udot: flip(&self.udot, true), vdot: flip(&self.vdot, false), divided_by: self.divided_by }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "udot": uv_string(&self.udot),
            "vdot": uv_string(&self.vdot),
            "divided_by": {"u": self.divided_by.0, "v": self.divided_by.1},
        })
    }
}

/// A singular point `(u, 0)` of chart 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart1Point {
    pub u: f64,
    pub trace: f64,
    pub det: f64,
    pub semi_hyperbolic: bool,
}

/// Separatrix `v = c |u|^((n+1)/n) + ...` of the chart-2 singularity.
#[derive(Clone, Debug)]
pub struct Chart2Separatrix {
    /// Sign of `u` on which the curve lies.
    pub side: f64,
    pub series: Puiseux<f64>,
    pub exponent: BigRational,
    pub speed: (f64, f64),
    pub warnings: Vec<String>,
}

impl Chart2Separatrix {
    pub fn coefficient(&self) -> f64 {
        self.series.lowest().map(|(_, c)| *c).unwrap_or(0.0)
    }
}

#[derive(Clone, Debug)]
pub struct InfinityAnalysis {
    pub m: u32,
    pub n: u32,
    pub chart1: ChartSystem,
    pub chart2: ChartSystem,
    pub chart1_dim: BigRational,
    pub chart2_dim: BigRational,
    pub multiplicity_at_infinity: u32,
    pub chart1_points: Vec<Chart1Point>,
    pub chart2_separatrices: Vec<Chart2Separatrix>,
    pub notes: Vec<String>,
}

/// Reads `(m, a, n, b)` from `x' = y`, `y' = a x^m + b x^n y`.
fn cusp_form(sys: &PlanarSystem) -> Result<(u32, BigRational, u32, BigRational), CuspError> {
    let x = sys.xdot_poly();
    if x.len() != 1 || x.coeff(0, 1) != BigRational::one() {
        return Err(CuspError::NotCuspForm("x' must be exactly y".into()));
    }
    let mut fx = None;
    let mut gx = None;
    for (i, j, c) in sys.ydot_poly().terms() {
        match j {
            0 if fx.is_none() => fx = Some((i, c.clone())),
            1 if gx.is_none() => gx = Some((i, c.clone())),
            _ => return Err(CuspError::NotCuspForm(format!("unexpected term x^{i} y^{j} in y'"))),
        }
    }
    let (m, a) = fx.ok_or_else(|| CuspError::NotCuspForm("missing a x^m".into()))?;
    let (n, b) = gx.ok_or_else(|| CuspError::NotCuspForm("missing b x^n y".into()))?;
    if m % 2 == 1 || m > 2 * n {
        return Err(CuspError::NotCuspForm(format!("need m even and m < 2n+1, got m = {m}, n = {n}")));
    }
    Ok((m, a, n, b))
}

fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let deg = match coeffs.iter().rposition(|c| *c != 0.0) {
        Some(d) => d,
        None => return Vec::new(),
    };
    let p = |u: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c);
    match deg {
        0 => Vec::new(),
        1 => vec![-coeffs[0] / coeffs[1]],
        _ => {
            let bound = 1.0 + coeffs[..deg].iter().map(|c| (c / coeffs[deg]).abs()).fold(0.0, f64::max);
            let steps = 20000;
            let mut roots = Vec::new();
            let mut prev = -bound;
            for k in 1..=steps {
                let u = -bound + 2.0 * bound * k as f64 / steps as f64;
                if p(prev) == 0.0 {
                    roots.push(prev);
                } else if p(prev).signum() != p(u).signum() && p(u) != 0.0 {
                    let (mut lo, mut hi) = (prev, u);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if p(mid).signum() == p(lo).signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    roots.push(0.5 * (lo + hi));
                }
                prev = u;
            }
            roots
        }
    }
}

fn chart1_points(ch: &ChartSystem) -> Vec<Chart1Point> {
    let deg = ch.udot.max_x_degree() as usize;
    let mut coeffs = vec![0.0; deg + 1];
    for (i, j, c) in ch.udot.terms() {
        if j == 0 {
            coeffs[i as usize] += rational_to_f64(c);
        }
    }
    let field = ch.field();
    real_roots(&coeffs)
        .into_iter()
        .filter(|&u| {
            use crate::ode::VectorField;
            field.eval([u, 0.0])[1].abs() < 1e-12
        })
        .map(|u| {
            let j = field.jacobian([u, 0.0]);
            let trace = j[0][0] + j[1][1];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let scale = j.iter().flatten().map(|v| v.abs()).fold(1e-300, f64::max);
            Chart1Point { u, trace, det, semi_hyperbolic: det.abs() <= 1e-12 * scale * scale && trace.abs() > 1e-9 * scale }
        })
        .collect()
}

/// Leading coefficients `c` for which `v = c u^(p0/d)` balances the invariance equation.
fn balance_roots(ch: &ChartSystem, d: u32, p0: i64) -> Vec<f64> {
    let resid = |c: f64| -> Option<Puiseux<f64>> {
        let g = Puiseux::from_terms(d, [(p0, c)], p0 + 8 * d as i64);
        let xg = crate::series::substitute_y(&ch.udot, &g).ok()?;
        let yg = crate::series::substitute_y(&ch.vdot, &g).ok()?;
        Some(g.derivative().mul(&xg).sub(&yg))
    };
    let Some(generic) = resid(1.234_567) else { return Vec::new() };
    let Some((e_star, _)) = generic.lowest() else { return Vec::new() };
    let h = |c: f64| resid(c).map(|r| r.coeff(e_star)).unwrap_or(0.0);
    let mut roots: Vec<f64> = Vec::new();
    let grid: Vec<f64> = (-4000..=4000).filter(|&k| k != 0).map(|k| k as f64 / 400.0).collect();
    for w in grid.windows(2) {
        if w[0] < 0.0 && w[1] > 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (w[0], w[1]);
        let (hl, hh) = (h(lo), h(hi));
        if hl == 0.0 {
            roots.push(lo);
            continue;
        }
        if hl.signum() == hh.signum() {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if h(mid).signum() == hl.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    roots
}

fn chart2_separatrices(ch: &ChartSystem, n: u32) -> Result<Vec<Chart2Separatrix>, CuspError> {
    let (d, p0) = (n, (n + 1) as i64);
    let mut out = Vec::new();
    for side in [1.0, -1.0] {
        let frame = if side > 0.0 { ch.clone() } else { ch.reflected_u() };
        for c in balance_roots(&frame, d, p0) {
            let CurveSolution { series, speed, warnings, .. } =
                solve_invariant_curve::<f64>(&frame.udot, &frame.vdot, d, p0, c, p0 + 6 * d as i64)?;
            out.push(Chart2Separatrix { side, series, exponent: BigRational::new(p0.into(), (d as i64).into()), speed: (speed.0, rational_to_f64(&speed.1)), warnings });
        }
        if !out.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// Charts at infinity of a cusp `x' = y`, `y' = a x^m + b x^n y` with `m` even, `m < 2n+1`.
pub fn infinity_analysis(sys: &PlanarSystem) -> Result<InfinityAnalysis, CuspError> {
    let (m, _a, n, _b) = cusp_form(sys)?;
    let chart1 = chart1_transform(sys);
    let chart2 = chart2_transform(sys);
    let one = BigRational::one();
    let chart1_dim = &one - BigRational::new(1.into(), ((2 * n + 2 - m) as i64).into());
    let chart2_dim = &one - BigRational::new(1.into(), ((n + 1) as i64).into());
    let chart1_points = chart1_points(&chart1);
    let mut notes = Vec::new();
    if chart1_points.is_empty() {
        notes.push("no singular point of chart 1 on v = 0".into());
    } else if !chart1_points.iter().any(|p| p.semi_hyperbolic) {
        notes.push("chart-1 singular points are not semi-hyperbolic".into());
    }
    let chart2_separatrices = chart2_separatrices(&chart2, n)?;
    if chart2_separatrices.is_empty() {
        notes.push("no real chart-2 separatrix of exponent (n+1)/n".into());
    }
    Ok(InfinityAnalysis {
        m,
        n,
        chart1,
        chart2,
        chart1_dim,
        chart2_dim,
        multiplicity_at_infinity: n / 2,
        chart1_points,
        chart2_separatrices,
        notes,
    })
}

impl InfinityAnalysis {
    /// Unit-time orbit of the chart-2 field along its first separatrix, starting at `|u| = u0`.
    pub fn chart2_orbit(&self, u0: f64, opts: &OrbitOptions) -> Option<OrbitSample> {
        let sep = self.chart2_separatrices.first()?;
        let field = self.chart2.field();
        let curve = |s: f64| -> State { [sep.side * s, sep.series.eval(s)] };
        let engine = Engine::Flow(&field);
        let inward = curve_orbit(&engine, &curve, u0, sep.speed, Approach::Inward, opts);
        // Nearby orbits close in on the curve only algebraically, so the direct orbit is kept
        // when it ends on the same side with the leading coefficient roughly right.
        let last = inward.points.last().copied().unwrap_or([0.0, 0.0]);
        let gamma = rational_to_f64(&sep.exponent);
        let w = last[1] / last[0].abs().powf(gamma);
        let c = sep.coefficient();
        if inward.count() > opts.n / 2 && last[0] * sep.side > 0.0 && (w - c).abs() <= 0.1 * c.abs() {
            return Some(inward);
        }
        Some(curve_orbit(&engine, &curve, u0, sep.speed, Approach::OutwardReverse, opts))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "n": self.n,
            "chart1_system": self.chart1.to_json(),
            "chart2_system": self.chart2.to_json(),
            "chart1_dim": format_rational(&self.chart1_dim),
            "chart2_dim": format_rational(&self.chart2_dim),
            "multiplicity_at_infinity": self.multiplicity_at_infinity,
            "chart1_points": self.chart1_points.iter().map(|p| json!({
                "u": p.u, "trace": p.trace, "det": p.det, "semi_hyperbolic": p.semi_hyperbolic
            })).collect::<Vec<_>>(),
            "chart2_separatrices": self.chart2_separatrices.iter().map(|s| json!({
                "side": s.side,
                "exponent": format_rational(&s.exponent),
                "coefficient": s.coefficient(),
                "terms": s.series.exponent_terms().iter().map(|(e, c)| json!([format_rational(e), c])).collect::<Vec<_>>(),
                "warnings": s.warnings,
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}
