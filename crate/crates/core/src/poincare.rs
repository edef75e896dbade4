//! Return map on the characteristic curve near a focus, displacement fits and the
//! cyclicity bound read off the box dimension of a return sequence.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::fractal::{fit_exponent, linear_fit, DimensionReport, FitOptions, FractalError, OrbitSample, OrbitSource};
use crate::ode::{locate_event, OdeError, PolyField, Reversed, Tolerances, VectorField};
use crate::series::coeff::format_rational;
use crate::series::PuiseuxSeries1;
use crate::system_model::{CharData, PlanarSystem};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PoincareError {
    #[error("no return to the curve from x0 = {x0} within time {t_max}: not a focus, or x0 too large")]
    NoReturn { x0: f64, t_max: f64 },
    #[error("trajectory from x0 = {x0} failed: {source}")]
    Integration { x0: f64, source: OdeError },
    #[error("return residual {residual:e} exceeds {limit:e}")]
    Residual { residual: f64, limit: f64 },
    #[error("x0 must be nonzero and within the guard radius {guard}, got {x0}")]
    BadStart { x0: f64, guard: f64 },
    #[error("indeterminate at this resolution: {0}")]
    Indeterminate(String),
    #[error(transparent)]
    Fractal(#[from] FractalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoincareOptions {
    pub tol: Tolerances,
    /// Largest admissible `|x0|`.
    pub guard: f64,
    /// Integration time allowed for a single return.
    pub t_max: f64,
    /// Largest accepted `|y - f(x)|` at a located return.
    pub residual_limit: f64,
    /// Sequences end once `|x|` drops below this.
    pub stop: f64,
}

impl Default for PoincareOptions {
    fn default() -> Self {
        PoincareOptions { tol: Tolerances::default(), guard: 0.3, t_max: 1e6, residual_limit: 1e-10, stop: 1e-14 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Return {
    pub x: f64,
    pub tau: f64,
    pub residual: f64,
}

/// First return of the trajectory from `(x0, f(x0))` to the curve `y = f(x)` on the same side.
pub fn return_map_field<F: VectorField + ?Sized>(
    field: &F,
    f: &dyn Fn(f64) -> f64,
    x0: f64,
    dir: Direction,
    opts: &PoincareOptions,
) -> Result<Return, PoincareError> {
    if x0 == 0.0 || x0.abs() > opts.guard {
        return Err(PoincareError::BadStart { x0, guard: opts.guard });
    }
    let g = |p: &[f64; 2]| p[1] - f(p[0]);
    let accept = |e: &crate::ode::Event| e.p[0] * x0 > 0.0;
    let y0 = [x0, f(x0)];
    let ev = match dir {
        Direction::Forward => locate_event(field, y0, opts.t_max, opts.tol, g, accept),
        Direction::Inverse => locate_event(&Reversed(field), y0, opts.t_max, opts.tol, g, accept),
    };
    let ev = match ev {
        Ok(Some(ev)) => ev,
        Ok(None) => return Err(PoincareError::NoReturn { x0, t_max: opts.t_max }),
        Err(OdeError::MaxSteps(_)) => return Err(PoincareError::NoReturn { x0, t_max: opts.t_max }),
        Err(source) => return Err(PoincareError::Integration { x0, source }),
    };
    if ev.residual > opts.residual_limit {
        return Err(PoincareError::Residual { residual: ev.residual, limit: opts.residual_limit });
    }
    Ok(Return { x: ev.p[0], tau: ev.t, residual: ev.residual })
}

/// `P(x0)` (or `P^{-1}(x0)`) on the characteristic curve `f` of `sys`.
pub fn return_map(sys: &PlanarSystem, f: &PuiseuxSeries1, x0: f64, dir: Direction, opts: &PoincareOptions) -> Result<Return, PoincareError> {
    let field = PolyField::from_system(sys);
    return_map_field(&field, &|x| f.eval(x), x0, dir, opts)
}

/// Direction in which returns approach the origin, judged from one forward return.
pub fn focus_direction<F: VectorField + ?Sized>(field: &F, f: &dyn Fn(f64) -> f64, x1: f64, opts: &PoincareOptions) -> Result<Direction, PoincareError> {
    let r = return_map_field(field, f, x1, Direction::Forward, opts)?;
    Ok(if r.x.abs() <= x1.abs() { Direction::Forward } else { Direction::Inverse })
}

/// `x_{k+1} = P(x_k)` (or `P^{-1}`), up to `n` returns.
pub fn poincare_sequence_field<F: VectorField + ?Sized>(
    field: &F,
    f: &dyn Fn(f64) -> f64,
    x1: f64,
    n: usize,
    dir: Direction,
    opts: &PoincareOptions,
) -> Result<OrbitSample, PoincareError> {
    let mut xs = vec![x1];
    let mut warnings = Vec::new();
    let mut x = x1;
    for _ in 0..n {
        match return_map_field(field, f, x, dir, opts) {
            Ok(r) => {
                x = r.x;
                xs.push(x);
                if x.abs() < opts.stop {
                    break;
                }
            }
            Err(e) if xs.len() > 1 => {
                warnings.push(format!("sequence stopped after {} points: {e}", xs.len()));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if (xs[xs.len() - 1] - x1).abs() <= 1e-9 * x1.abs() {
        warnings.push("center-like, no dimension claim".into());
    }
    let mut out = OrbitSample::scalar(&xs, OrbitSource::PoincareMap);
    out.warnings = warnings;
    Ok(out)
}

pub fn poincare_sequence(sys: &PlanarSystem, f: &PuiseuxSeries1, x1: f64, n: usize, dir: Direction, opts: &PoincareOptions) -> Result<OrbitSample, PoincareError> {
    let field = PolyField::from_system(sys);
    poincare_sequence_field(&field, &|x| f.eval(x), x1, n, dir, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoincareFit {
    /// `(x0, P(x0))` pairs.
    pub samples: Vec<(f64, f64)>,
    pub direction: Direction,
    /// Exponent `p` of `|P(x) - x| ~ |c| x^p`.
    pub fitted_exp: f64,
    pub fitted_coeff: f64,
    pub fit_r2: f64,
    pub seq_dim: DimensionReport,
    /// `"2k+1"` or `"2k+2"` for the displacement exponent, if it is near an integer.
    pub pattern: Option<&'static str>,
    pub k_from_dimension: Option<u32>,
    pub k_from_exponent: Option<u32>,
    /// Agreed `k`, when both estimators give the same value.
    pub k_bound: Option<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// `k` with `dim` within `tol` of `1 - 1/(2k+1)` or `1 - 1/(2k+2)`, choosing the nearest.
pub fn k_from_dimension(dim: f64, tol: f64) -> Option<(u32, &'static str)> {
    let mut best: Option<(f64, u32, &'static str)> = None;
    for k in 0..64u32 {
        for (p, label) in [(2 * k + 1, "2k+1"), (2 * k + 2, "2k+2")] {
            let d = (dim - (1.0 - 1.0 / p as f64)).abs();
            if d <= tol && best.is_none_or(|b| d < b.0) {
                best = Some((d, k, label));
            }
        }
    }
    best.map(|(_, k, l)| (k, l))
}

/// `k` from an exponent near `2k+1` or `2k+2`.
pub fn k_from_exponent(p: f64, tol: f64) -> Option<(u32, &'static str)> {
    let r = p.round();
    if (p - r).abs() > tol || r < 1.0 {
        return None;
    }
    let r = r as u32;
    Some(if r % 2 == 1 { ((r - 1) / 2, "2k+1") } else { ((r - 2) / 2, "2k+2") })
}

/// Fits the displacement on a geometric grid of starting points and the box dimension of
/// the return sequence from `x1`.
pub fn poincare_fit<F: VectorField + ?Sized>(
    field: &F,
    f: &dyn Fn(f64) -> f64,
    x1: f64,
    n: usize,
    grid: (f64, f64, usize),
    opts: &PoincareOptions,
) -> Result<(PoincareFit, OrbitSample), PoincareError> {
    let dir = focus_direction(field, f, x1, opts)?;
    let seq = poincare_sequence_field(field, f, x1, n, dir, opts)?;
    let xs = seq.xs();
    let seq_dim = fit_exponent(&xs, &FitOptions::default())?;

    let (lo, hi, count) = grid;
    let mut samples = Vec::new();
    for i in 0..count.max(2) {
        let x0 = lo * (hi / lo).powf(i as f64 / (count.max(2) - 1) as f64);
        let r = return_map_field(field, f, x0, dir, opts)?;
        samples.push((x0, r.x));
    }
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    let mut sign = 0.0;
    for &(x0, px) in &samples {
        let d = px - x0;
        if d != 0.0 {
            lx.push(x0.abs().ln());
            ly.push(d.abs().ln());
            sign = d.signum();
        }
    }
    let mut notes = Vec::new();
    let (fitted_exp, c, fit_r2) = if lx.len() >= 2 { linear_fit(&lx, &ly) } else { (f64::NAN, f64::NAN, 0.0) };
    let fitted_coeff = sign * c.exp();
    if samples.iter().any(|&(x0, px)| (px - x0) * sign < 0.0) {
        notes.push("displacement changes sign over the sample window".into());
    }
    let kd = k_from_dimension(seq_dim.estimate, 0.04);
    let ke = k_from_exponent(fitted_exp, 0.1);
    let k_bound = match (kd, ke) {
        (Some((a, _)), Some((b, _))) if a == b => Some(a),
        _ => {
            notes.push("dimension-based and exponent-based k disagree or are undetermined".into());
            None
        }
    };
    if seq.warnings.iter().any(|w| w.contains("center-like")) {
        notes.push("center-like, no dimension claim".into());
    }
    Ok((
        PoincareFit {
            samples,
            direction: dir,
            fitted_exp,
            fitted_coeff,
            fit_r2,
            seq_dim,
            pattern: ke.map(|(_, l)| l),
            k_from_dimension: kd.map(|(k, _)| k),
            k_from_exponent: ke.map(|(k, _)| k),
            k_bound,
            notes,
        },
        seq,
    ))
}

/// The `k` of a consistent fit: at most `k` limit cycles bifurcate.
pub fn cyclicity_bound(fit: &PoincareFit) -> Result<u32, PoincareError> {
    fit.k_bound.ok_or_else(|| {
        PoincareError::Indeterminate(format!(
            "dimension {:.4} gives {:?}, displacement exponent {:.4} gives {:?}",
            fit.seq_dim.estimate, fit.k_from_dimension, fit.fitted_exp, fit.k_from_exponent
        ))
    })
}

/// Leading-term focus conditions with `F = -B(x, f)`, `G = -(A_x + B_y)(x, f)`:
/// `F ~ a x^(2n-1)` with `a > 0`, `n >= 2`, and `b^2 - 4 n a < 0` for `b = [x^(n-1)] G`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FocusConditions {
    pub holds: bool,
    pub n: Option<u32>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub detail: String,
}

pub fn focus_conditions(cd: &CharData) -> FocusConditions {
    let fail = |n, a: Option<&BigRational>, b: Option<&BigRational>, detail: String| FocusConditions {
        holds: false,
        n,
        a: a.map(format_rational),
        b: b.map(format_rational),
        detail,
    };
    let (m, a) = match (cd.m, &cd.a) {
        (Some(m), Some(a)) => (m, -a.clone()),
        _ => return fail(None, None, None, "F vanishes to the working order".into()),
    };
    if m % 2 == 0 || m < 3 {
        return fail(None, Some(&a), None, format!("leading exponent of F is {m}, not 2n-1 with n >= 2"));
    }
    let n = m.div_ceil(2);
    let b = -cd.big_g.coeff_at(&BigRational::from_integer((n as i64 - 1).into()));
    if !a.is_positive() {
        return fail(Some(n), Some(&a), Some(&b), format!("a_{m} = {} is not positive", format_rational(&a)));
    }
    let disc = &b * &b - BigRational::from_integer((4 * n as i64).into()) * &a;
    let holds = disc.is_negative();
    FocusConditions {
        holds,
        n: Some(n),
        a: Some(format_rational(&a)),
        b: Some(format_rational(&b)),
        detail: format!("b^2 - 4na = {}{}", format_rational(&disc), if holds { " < 0" } else if disc.is_zero() { " = 0" } else { " > 0" }),
    }
}

impl PoincareFit {
    pub fn displacement_csv(&self) -> String {
        let mut s = String::from("x0,displacement\n");
        for (x0, px) in &self.samples {
            s.push_str(&format!("{x0:e},{:e}\n", px - x0));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or(Value::Null)
    }
}
