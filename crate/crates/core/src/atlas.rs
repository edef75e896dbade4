//! Box dimensions across the unfolding `x' = y`, `y' = b1 + b2 x + x^2 - x y`.
//!
//! The fold curves `T-`/`T+` are `b1 = b2^2/4` on either side of `b2 = 0`; `H` is the
//! negative `b2` axis; the homoclinic curve `P` is placed at its leading-order
//! approximation `b1 = -6/25 b2^2` and only labelled.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::classifier::classify;
use crate::cusp_infinity::{cusp_dimensions, separatrix_orbit, separatrix_series, Branch, OrbitMode};
use crate::fractal::{
    fit_exponent, flow_orbit, grid_boxcount_dimension, BoxOptions, Closure, DimensionReport, FitOptions, OrbitOptions,
};
use crate::ode::{dense_trajectory, time_map_orbit, PolyField, Reversed, State, Tolerances};
use crate::poincare::{poincare_fit, PoincareOptions};
use crate::series::coeff::{format_rational, int, rational_to_f64};
use crate::system_model::PlanarSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Region {
    #[serde(rename = "origin")]
    Origin,
    #[serde(rename = "T-")]
    TMinus,
    #[serde(rename = "T+")]
    TPlus,
    H,
    P,
    #[serde(rename = "1")]
    R1,
    #[serde(rename = "2")]
    R2,
    #[serde(rename = "3")]
    R3,
    #[serde(rename = "4")]
    R4,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::Origin => "origin",
            Region::TMinus => "T-",
            Region::TPlus => "T+",
            Region::H => "H",
            Region::P => "P",
            Region::R1 => "1",
            Region::R2 => "2",
            Region::R3 => "3",
            Region::R4 => "4",
        }
    }
}

pub fn homoclinic_beta1(b2: f64) -> f64 {
    -6.0 / 25.0 * b2 * b2
}

/// Region or curve of `(b1, b2)`, with a flag when the point is within `10 tol` of a curve
/// it was not assigned to.
pub fn classify_parameters(b1: f64, b2: f64, tol: f64) -> (Region, Option<String>) {
    let fold = b1 - b2 * b2 / 4.0;
    if b1.abs() <= tol && b2.abs() <= tol {
        return (Region::Origin, None);
    }
    if fold.abs() <= tol {
        return (if b2 < 0.0 { Region::TMinus } else { Region::TPlus }, None);
    }
    let p = b1 - homoclinic_beta1(b2);
    if b2 < 0.0 && b1.abs() <= tol {
        return (Region::H, None);
    }
    if b2 < 0.0 && p.abs() <= tol {
        return (Region::P, None);
    }
    let region = if fold > 0.0 {
        Region::R1
    } else if b2 < 0.0 && b1 > 0.0 {
        Region::R2
    } else if b2 < 0.0 && p > 0.0 {
        Region::R3
    } else {
        Region::R4
    };
    let near = [
        (fold.abs(), "fold curve"),
        (if b2 < 0.0 { b1.abs() } else { f64::INFINITY }, "H"),
        (if b2 < 0.0 { p.abs() } else { f64::INFINITY }, "P"),
        (b1.hypot(b2), "origin"),
    ];
    let flag = near.iter().find(|(d, _)| *d <= 10.0 * tol).map(|(_, c)| format!("ambiguous: within {} of {c}", 10.0 * tol));
    (region, flag)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equilibrium {
    pub x: f64,
    pub trace: f64,
    pub det: f64,
    pub kind: &'static str,
}

pub fn equilibria(b1: f64, b2: f64, tol: f64) -> Vec<Equilibrium> {
    let disc = b2 * b2 - 4.0 * b1;
    let roots: Vec<f64> = if disc.abs() <= tol {
        vec![-b2 / 2.0]
    } else if disc < 0.0 {
        vec![]
    } else {
        let s = disc.sqrt();
        vec![(-b2 - s) / 2.0, (-b2 + s) / 2.0]
    };
    roots
        .into_iter()
        .map(|x| {
            let trace = -x;
            let det = -(b2 + 2.0 * x);
            let kind = if det.abs() <= tol && trace.abs() <= tol {
                "nilpotent cusp"
            } else if det.abs() <= tol {
                "saddle-node"
            } else if det < 0.0 {
                "saddle"
            } else if trace.abs() <= tol {
                "weak focus"
            } else if trace * trace < 4.0 * det {
                if trace < 0.0 { "stable focus" } else { "unstable focus" }
            } else if trace < 0.0 {
                "stable node"
            } else {
                "unstable node"
            };
            Equilibrium { x, trace, det, kind }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedDimension {
    pub set: String,
    pub report: DimensionReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BTAtlasEntry {
    pub beta: (f64, f64),
    pub label: Region,
    pub equilibria: Vec<Equilibrium>,
    pub dimensions: Vec<NamedDimension>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_bound: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtlasOptions {
    pub orbit_n: usize,
    /// Starting distance from the equilibrium.
    pub x0: f64,
    pub tol: Tolerances,
    /// Tolerance for placing a parameter point on a curve.
    pub curve_tol: f64,
    pub poincare_n: usize,
    /// Duration of the spiral trajectory on `H`, in linear periods.
    pub spiral_turns: f64,
    /// `(largest, smallest)` epsilon of the spiral box count.
    pub spiral_eps: (f64, f64),
    pub eps_levels: usize,
}

impl Default for AtlasOptions {
    fn default() -> Self {
        AtlasOptions {
            orbit_n: 2000,
            x0: 0.05,
            tol: Tolerances::default(),
            curve_tol: 1e-9,
            poincare_n: 300,
            spiral_turns: 1000.0,
            spiral_eps: (1e-4, 1e-5),
            eps_levels: 10,
        }
    }
}

/// Representative points: the origin, each curve of local bifurcations and each region.
pub fn default_samples() -> Vec<(f64, f64)> {
    vec![
        (0.0, 0.0),
        (0.0625, -0.5),
        (0.0625, 0.5),
        (0.0, -0.5),
        (homoclinic_beta1(-0.5), -0.5),
        (0.05, -0.2),
        (0.04, -0.5),
        (-0.02, -0.5),
        (-0.1, -0.5),
    ]
}

fn bt_field(b1: f64, b2: f64) -> PolyField {
    PolyField::new(vec![(0, 1, 1.0)], vec![(0, 0, b1), (1, 0, b2), (2, 0, 1.0), (1, 1, -1.0)])
}

/// The unfolding in `u = x - x*` around an equilibrium `x*`, expanded so that the field
/// vanishes exactly at `u = y = 0`.
fn shifted_field(b2: f64, xs: f64) -> PolyField {
    PolyField::new(vec![(0, 1, 1.0)], vec![(1, 0, b2 + 2.0 * xs), (2, 0, 1.0), (0, 1, -xs), (1, 1, -1.0)])
}

fn named(set: &str, report: DimensionReport) -> NamedDimension {
    NamedDimension { set: set.into(), report }
}

pub fn bt_entry(b1: f64, b2: f64, opts: &AtlasOptions) -> BTAtlasEntry {
    let (label, flag) = classify_parameters(b1, b2, opts.curve_tol);
    log::debug!("atlas point ({b1}, {b2}) labelled {}", label.label());
    let mut entry = BTAtlasEntry {
        beta: (b1, b2),
        label,
        equilibria: equilibria(b1, b2, opts.curve_tol),
        dimensions: Vec::new(),
        k_bound: None,
        notes: flag.into_iter().collect(),
    };
    let result = match label {
        Region::Origin => origin_dims(opts, &mut entry),
        Region::TMinus | Region::TPlus => saddle_node_dims(b2, opts, &mut entry),
        Region::H => hopf_dims(b1, b2, opts, &mut entry),
        Region::P => {
            entry.notes.push("global bifurcation, dimension out of scope".into());
            Ok(())
        }
        _ => hyperbolic_dims(b2, opts, &mut entry),
    };
    if let Err(e) = result {
        entry.notes.push(format!("dimension computation failed: {e}"));
    }
    entry
}

pub fn bt_atlas(samples: &[(f64, f64)], opts: &AtlasOptions) -> Vec<BTAtlasEntry> {
    samples.par_iter().map(|&(b1, b2)| bt_entry(b1, b2, opts)).collect()
}

type Res = Result<(), Box<dyn std::error::Error + Send + Sync>>;

fn origin_dims(opts: &AtlasOptions, entry: &mut BTAtlasEntry) -> Res {
    let sys = PlanarSystem::from_terms(&[(0, 1, int(1))], &[(2, 0, int(1)), (1, 1, int(-1))], None)?;
    let cd = sys.char_data()?;
    let class = classify(&cd);
    let seps = separatrix_series(&sys, &cd, &class, None)?;
    let sep = seps.iter().find(|s| s.branch == Branch::Stable).ok_or("no stable separatrix")?;
    let orbit_opts = OrbitOptions { n: opts.orbit_n, tol: opts.tol, ..Default::default() };
    let orbit = separatrix_orbit(&sys, sep, opts.x0, OrbitMode::NumericalFlow, &orbit_opts)?;
    let [dx, dy, d] = cusp_dimensions(2)?;
    let abs = |v: Vec<f64>| v.into_iter().map(f64::abs).collect::<Vec<_>>();
    let fit = FitOptions::default();
    let sx = fit_exponent(&abs(orbit.xs()), &fit)?.with_prediction(rational_to_f64(&dx), Some(format_rational(&dx)));
    let sy = fit_exponent(&abs(orbit.ys()), &fit)?.with_prediction(rational_to_f64(&dy), Some(format_rational(&dy)));
    let s = grid_boxcount_dimension(&orbit.points, [0.0, 0.0], &BoxOptions { levels: opts.eps_levels, ..Default::default() })?
        .with_prediction(rational_to_f64(&d), Some(format_rational(&d)));
    entry.dimensions.extend([named("S", s), named("S_x", sx), named("S_y", sy)]);
    entry.notes.push("nilpotent cusp; stable separatrix".into());
    Ok(())
}

/// Orbit tending to the saddle-node at `x*` along its centre manifold `y ~ u^2 / x*`,
/// iterated in the time direction in which the fast eigenvalue `-x*` attracts.
fn saddle_node_dims(b2: f64, opts: &AtlasOptions, entry: &mut BTAtlasEntry) -> Res {
    let xs = -b2 / 2.0;
    let shifted = shifted_field(b2, xs);
    let direction = if xs > 0.0 { 1.0 } else { -1.0 };
    // In eigen-coordinates a = u + y/x*, b = -y/x* the manifold is b ~ -a^2/x*^2 and
    // a' ~ a^2/x*, so a < 0 approaches in either direction. The start keeps the centre drift
    // slow against the fast relaxation.
    let a0 = -opts.x0.min(xs.abs() / 25.0);
    let b0 = -a0 * a0 / (xs * xs);
    let start = [a0 + b0, -xs * b0];
    let orbit_opts = OrbitOptions { n: opts.orbit_n, tol: opts.tol, direction, ..Default::default() };
    let orbit = flow_orbit(&shifted, start, &orbit_opts);
    let us: Vec<f64> = orbit.xs().into_iter().map(f64::abs).collect();
    let sx = fit_exponent(&us, &FitOptions::default())?.with_prediction(0.5, Some("1/2".into()));
    let s = grid_boxcount_dimension(&orbit.points, [0.0, 0.0], &BoxOptions { levels: opts.eps_levels, ..Default::default() })?
        .with_prediction(0.5, Some("1/2".into()));
    entry.dimensions.extend([named("S", s), named("S_x", sx)]);
    entry.notes.push(format!(
        "saddle-node at x = {xs}; centre-manifold orbit in {} time",
        if direction > 0.0 { "forward" } else { "reversed" }
    ));
    Ok(())
}

fn hopf_dims(b1: f64, b2: f64, opts: &AtlasOptions, entry: &mut BTAtlasEntry) -> Res {
    let field = bt_field(b1, b2);
    let popts = PoincareOptions { tol: opts.tol, ..Default::default() };
    let x1 = 4.0 * opts.x0;
    let (fit, _) = poincare_fit(&field, &|_| 0.0, x1, opts.poincare_n, (x1 / 20.0, x1 / 2.0, 12), &popts)?;
    entry.k_bound = fit.k_bound;
    entry.dimensions.push(named("poincare_sequence", fit.seq_dim.clone().with_prediction(2.0 / 3.0, Some("2/3".into()))));

    let period = 2.0 * std::f64::consts::PI / (-b2).sqrt();
    let t_end = opts.spiral_turns * period;
    let pts = dense_trajectory(&field, [x1, 0.0], t_end, 16, opts.tol, |_| true)?;
    let last = pts[pts.len() - 1];
    let r = last[0].hypot(last[1]);
    let (hi, lo) = opts.spiral_eps;
    let bopts = BoxOptions { eps0: Some(hi), eps_min: Some(lo), levels: opts.eps_levels, polyline: true, closure: Closure::Disk(r) };
    let spiral = grid_boxcount_dimension(&pts, [0.0, 0.0], &bopts)?.with_prediction(4.0 / 3.0, Some("4/3".into()));
    entry.dimensions.push(named("spiral", spiral));
    entry.notes.push(format!(
        "weak focus; displacement exponent {:.3}, pattern {}",
        fit.fitted_exp,
        fit.pattern.unwrap_or("none")
    ));
    Ok(())
}

/// Distances to a hyperbolic equilibrium along an orbit converging to it; foci use their
/// return map on the horizontal line instead.
fn hyperbolic_dims(b2: f64, opts: &AtlasOptions, entry: &mut BTAtlasEntry) -> Res {
    if entry.equilibria.is_empty() {
        entry.notes.push("no singularities".into());
        return Ok(());
    }
    for eq in entry.equilibria.clone() {
        let shifted = shifted_field(b2, eq.x);
        let name = format!("{} at x = {:.6}", eq.kind, eq.x);
        let seq: Vec<f64> = if eq.kind.ends_with("focus") {
            let popts = PoincareOptions { tol: opts.tol, guard: 1.0, ..Default::default() };
            let dir = crate::poincare::focus_direction(&shifted, &|_| 0.0, opts.x0, &popts)?;
            crate::poincare::poincare_sequence_field(&shifted, &|_| 0.0, opts.x0, opts.orbit_n, dir, &popts)?.xs()
        } else if eq.kind.ends_with("node") {
            let rate = eq.trace.abs() / 2.0;
            let dt = (0.2 / rate).min(1.0);
            let y0 = [opts.x0, 0.0];
            let (pts, _) = if eq.trace < 0.0 {
                time_map_orbit(&shifted, y0, dt, opts.orbit_n, opts.tol, |p| inside(p, 2.0 * opts.x0))
            } else {
                time_map_orbit(&Reversed(&shifted), y0, dt, opts.orbit_n, opts.tol, |p| inside(p, 2.0 * opts.x0))
            };
            monotone_prefix(pts.iter().map(|p| p[0].hypot(p[1])).collect())
        } else {
            saddle_stable_distances(&shifted, &eq, opts)?
        };
        let rep = fit_exponent(&seq, &FitOptions::default())?.with_prediction(0.0, Some("0".into()));
        entry.dimensions.push(named(&name, rep));
    }
    entry.notes.push("hyperbolic equilibria".into());
    Ok(())
}

fn inside(p: &State, guard: f64) -> bool {
    let r = p[0].hypot(p[1]);
    r > 1e-14 && r < guard
}

fn monotone_prefix(v: Vec<f64>) -> Vec<f64> {
    let end = v.windows(2).position(|w| w[1] >= w[0]).map_or(v.len(), |i| i + 1);
    v[..end].to_vec()
}

/// Approaches the saddle along its stable manifold. The manifold is found by integrating
/// backward from a point close to the saddle on the stable eigenvector, which attracts in
/// reversed time.
fn saddle_stable_distances(field: &PolyField, eq: &Equilibrium, opts: &AtlasOptions) -> Result<Vec<f64>, Box<dyn std::error::Error + Send + Sync>> {
    let xs = eq.x;
    let ls = (-xs - (xs * xs + 4.0 * (-eq.det)).sqrt()) / 2.0;
    let norm = 1.0f64.hypot(ls);
    let start = [1e-8 / norm, 1e-8 * ls / norm];
    let mut far = start;
    let back = Reversed(field);
    let (pts, _) = time_map_orbit(&back, start, 0.05 / ls.abs(), 100_000, opts.tol, |p| p[0].hypot(p[1]) < opts.x0);
    if let Some(p) = pts.last() {
        far = *p;
    }
    let dt = 0.1 / ls.abs();
    let (pts, _) = time_map_orbit(field, far, dt, opts.orbit_n, opts.tol, |p| inside(p, 2.0 * opts.x0));
    Ok(monotone_prefix(pts.iter().map(|p| p[0].hypot(p[1])).collect()))
}

pub fn atlas_json(entries: &[BTAtlasEntry]) -> Value {
    serde_json::to_value(entries).unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_labels() {
        let tol = 1e-9;
        let labels: Vec<&str> = default_samples().iter().map(|&(a, b)| classify_parameters(a, b, tol).0.label()).collect();
        assert_eq!(labels, ["origin", "T-", "T+", "H", "P", "1", "2", "3", "4"]);
        assert_eq!(classify_parameters(0.01, 0.5, tol).0, Region::R4);
        assert!(classify_parameters(1e-9 * 5.0, -0.5, tol).1.is_some());
    }

    #[test]
    fn equilibrium_inventory() {
        assert!(equilibria(0.05, -0.2, 1e-9).is_empty());
        let e = equilibria(0.04, -0.5, 1e-9);
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].kind, "stable focus");
        assert_eq!(e[1].kind, "saddle");
        assert_eq!(equilibria(0.0625, -0.5, 1e-9)[0].kind, "saddle-node");
        assert_eq!(equilibria(0.0, -0.5, 1e-9)[0].kind, "weak focus");
        assert_eq!(equilibria(0.0, 0.0, 1e-9)[0].kind, "nilpotent cusp");
    }
}
