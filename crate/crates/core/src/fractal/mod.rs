//! Discrete orbits of the unit-time map and their box dimension.

mod closed_form;
mod estimate;

use serde::Serialize;

pub use closed_form::{lemma2_dimension, lemma2_exact, theorem3_dimensions, theorem3_exact, Theorem3Dims};
pub use estimate::{
    fit_exponent, grid_boxcount_dimension, interval_union_dimension, linear_fit, BoxOptions, Closure, DimensionReport,
    FitOptions, LadderOptions, Method, Prediction,
};

use crate::ode::{time_map_orbit, Reversed, State, Tolerances, VectorField};
use crate::unit_time::UnitTimeMap;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FractalError {
    #[error("sequence is not strictly monotone at index {index}")]
    NonMonotone { index: usize },
    #[error("only {usable} usable points, need at least {needed}")]
    TooFewPoints { usable: usize, needed: usize },
    #[error("exponents must exceed 1, got {0}")]
    ExponentTooSmall(f64),
    #[error("gamma = {gamma} outside (1, {m})")]
    GammaOutOfRange { gamma: String, m: u32 },
    #[error("ladder: {0}")]
    Resolution(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitSource {
    NumericalFlow,
    TruncatedMap,
    PoincareMap,
    Synthetic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitSample {
    pub points: Vec<State>,
    pub source: OrbitSource,
    pub initial: State,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl OrbitSample {
    pub fn new(points: Vec<State>, source: OrbitSource) -> Self {
        let initial = points.first().copied().unwrap_or([0.0, 0.0]);
        OrbitSample { points, source, initial, warnings: Vec::new() }
    }

    /// Scalar sample stored in the first coordinate.
    pub fn scalar(values: &[f64], source: OrbitSource) -> Self {
        Self::new(values.iter().map(|&v| [v, 0.0]).collect(), source)
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p[0]).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p[1]).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.points.iter().map(|p| p[0].hypot(p[1])).collect()
    }

    /// `k,x,y` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,x,y\n");
        for (k, p) in self.points.iter().enumerate() {
            s.push_str(&format!("{k},{:e},{:e}\n", p[0], p[1]));
        }
        s
    }

    fn check_convergence(&mut self) {
        let n = self.norms();
        if n.len() >= 2 && n[n.len() - 1] >= n[0] {
            self.warnings.push("orbit does not approach the origin".into());
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitOptions {
    pub n: usize,
    pub tol: Tolerances,
    /// Iteration stops once the orbit leaves this radius.
    pub guard: f64,
    /// Iteration stops once the orbit is this close to the origin.
    pub stop: f64,
    /// `+1` iterates the time-one map, `-1` its inverse.
    pub direction: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions { n: 2000, tol: Tolerances::default(), guard: 1.0, stop: 1e-14, direction: 1.0 }
    }
}

fn keep_going(p: &State, opts: &OrbitOptions, escaped: &mut bool) -> bool {
    let r = p[0].hypot(p[1]);
    if r.is_nan() || r > opts.guard {
        *escaped = true;
        return false;
    }
    r >= opts.stop
}

/// Orbit of the time-one flow of `field`, integrated numerically.
pub fn flow_orbit<F: VectorField + ?Sized>(field: &F, x0: State, opts: &OrbitOptions) -> OrbitSample {
    let mut escaped = false;
    let (points, err) = if opts.direction < 0.0 {
        time_map_orbit(&Reversed(field), x0, 1.0, opts.n, opts.tol, |p| keep_going(p, opts, &mut escaped))
    } else {
        time_map_orbit(field, x0, 1.0, opts.n, opts.tol, |p| keep_going(p, opts, &mut escaped))
    };
    let mut out = OrbitSample::new(points, OrbitSource::NumericalFlow);
    finish(&mut out, escaped, opts);
    if let Some(e) = err {
        out.warnings.push(format!("integration stopped after {} points: {e}", out.count()));
    }
    out
}

/// Orbit of a truncated Taylor map, evaluated in floating point.
pub fn map_orbit(map: &UnitTimeMap, x0: State, opts: &OrbitOptions) -> OrbitSample {
    let u1 = map.u1.to_f64_terms();
    let u2 = map.u2.to_f64_terms();
    let ev = |t: &[(u32, u32, f64)], p: &State| -> f64 {
        t.iter().map(|&(i, j, c)| c * p[0].powi(i as i32) * p[1].powi(j as i32)).sum()
    };
    let mut points = vec![x0];
    let mut escaped = false;
    let mut p = x0;
    for _ in 0..opts.n {
        p = [ev(&u1, &p), ev(&u2, &p)];
        points.push(p);
        if !keep_going(&p, opts, &mut escaped) {
            break;
        }
    }
    let mut out = OrbitSample::new(points, OrbitSource::TruncatedMap);
    finish(&mut out, escaped, opts);
    out
}

/// What advances an orbit by one unit of time.
#[derive(Clone, Copy)]
pub enum Engine<'a> {
    Flow(&'a dyn VectorField),
    /// Truncated Taylor maps of the time-one and time-minus-one flows.
    Maps { forward: &'a UnitTimeMap, inverse: &'a UnitTimeMap },
}

impl Engine<'_> {
    pub fn source(&self) -> OrbitSource {
        match self {
            Engine::Flow(_) => OrbitSource::NumericalFlow,
            Engine::Maps { .. } => OrbitSource::TruncatedMap,
        }
    }

    pub fn orbit(&self, x0: State, opts: &OrbitOptions) -> OrbitSample {
        match *self {
            Engine::Flow(f) => flow_orbit(f, x0, opts),
            Engine::Maps { forward, inverse } => map_orbit(if opts.direction < 0.0 { inverse } else { forward }, x0, opts),
        }
    }
}

/// How an orbit along an invariant curve through the origin is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    /// Iterate toward the origin from the point at `x0`; suited to curves that attract
    /// nearby orbits on the way in.
    Inward,
    /// Iterate away from the origin from a seed close to it and reverse the list; suited to
    /// curves that repel nearby orbits on the way in, such as cusp separatrices.
    OutwardReverse,
}

/// Orbit along the curve `s -> curve(s)`, whose first coordinate is `+-s`, starting near
/// `s = x0` and heading to the origin.
///
/// `speed = (k, sigma)` is the leading law `s' ~ k |s|^sigma` along the curve; its sign
/// fixes the time direction and, for [`Approach::OutwardReverse`], it places the seed so
/// that about `opts.n` steps lie between the seed and `x0`.
pub fn curve_orbit(engine: &Engine, curve: &dyn Fn(f64) -> State, x0: f64, speed: (f64, f64), approach: Approach, opts: &OrbitOptions) -> OrbitSample {
    let (k, sigma) = speed;
    let inward = if k * x0.signum() < 0.0 { 1.0 } else { -1.0 };
    match approach {
        Approach::Inward => engine.orbit(curve(x0), &OrbitOptions { direction: inward, ..*opts }),
        Approach::OutwardReverse => {
            let a = x0.abs();
            let n = opts.n as f64;
            let s_n = if sigma > 1.0 {
                (a.powf(1.0 - sigma) + (sigma - 1.0) * k.abs() * n).powf(-1.0 / (sigma - 1.0))
            } else {
                a * (-k.abs() * n).exp()
            };
            let seed = x0.signum() * (0.8 * s_n).max(opts.stop);
            let out_opts = OrbitOptions { direction: -inward, n: 8 * opts.n, guard: 2.0 * a.max(opts.stop), ..*opts };
            let mut sample = engine.orbit(curve(seed), &out_opts);
            let reached = sample.points.iter().position(|p| p[0].abs() > a);
            let mut pts = sample.points;
            let mut warnings = std::mem::take(&mut sample.warnings);
            warnings.retain(|w| !w.contains("does not approach") && !w.contains("guard radius"));
            match reached {
                Some(i) => pts.truncate(i),
                None => warnings.push(format!("outward orbit did not reach |x| = {a} from seed {seed:e}")),
            }
            pts.reverse();
            pts.truncate(opts.n + 1);
            let mut out = OrbitSample::new(pts, engine.source());
            out.warnings = warnings;
            out.check_convergence();
            out
        }
    }
}

fn finish(out: &mut OrbitSample, escaped: bool, opts: &OrbitOptions) {
    if escaped {
        out.points.pop();
        out.warnings.push(format!("orbit left the guard radius {} after {} points", opts.guard, out.count()));
    }
    out.check_convergence();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::PolyField;
    use crate::series::coeff::int;
    use crate::system_model::PlanarSystem;
    use crate::unit_time::picard_unit_time;

    #[test]
    fn fixed_line_gives_constant_orbit() {
        let f = PolyField::new(vec![(0, 1, 1.0)], vec![]);
        let o = flow_orbit(&f, [0.2, 0.0], &OrbitOptions { n: 60, ..Default::default() });
        assert_eq!(o.count(), 61);
        assert!(o.points.iter().all(|p| *p == [0.2, 0.0]));
        assert!(o.warnings.iter().any(|w| w.contains("does not approach")));
    }

    #[test]
    fn truncated_map_matches_flow() {
        // x' = y - x^3 style contraction
        let sys = PlanarSystem::from_terms(&[(0, 1, int(1)), (3, 0, int(-1))], &[(5, 0, int(-1))], Some(9)).unwrap();
        let u = picard_unit_time(&sys, 9).unwrap();
        let opts = OrbitOptions { n: 100, ..Default::default() };
        let a = map_orbit(&u, [0.05, 0.0], &opts);
        let b = flow_orbit(&PolyField::from_system(&sys), [0.05, 0.0], &opts);
        let d = (a.points[100][0] - b.points[100][0]).abs();
        assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn guard_escape_is_reported() {
        let f = PolyField::new(vec![(1, 0, 1.0)], vec![]);
        let o = flow_orbit(&f, [0.1, 0.0], &OrbitOptions { n: 50, ..Default::default() });
        assert!(o.count() < 5);
        assert!(o.warnings[0].contains("guard"));
    }
}
