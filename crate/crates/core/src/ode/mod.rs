//! Adaptive Dormand-Prince 8(5,3) integration of planar autonomous fields, with
//! seventh-order dense output and event location.

mod field;
mod tableau;

pub use field::PolyField;

use tableau::*;

pub type State = [f64; 2];

/// Autonomous planar vector field.
pub trait VectorField: Sync {
    fn eval(&self, p: State) -> State;
}

impl<F> VectorField for F
where
    F: Fn(State) -> State + Sync,
{
    fn eval(&self, p: State) -> State {
        self(p)
    }
}

/// The field with time reversed.
pub struct Reversed<'a, F: ?Sized>(pub &'a F);

impl<F: VectorField + ?Sized> VectorField for Reversed<'_, F> {
    fn eval(&self, p: State) -> State {
        let v = self.0.eval(p);
        [-v[0], -v[1]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-12, atol: 1e-24, max_steps: 5_000_000, h_max: f64::INFINITY }
    }
}

impl Tolerances {
    pub fn with_rtol(rtol: f64) -> Self {
        Tolerances { rtol, ..Default::default() }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepSize { t: f64 },
    #[error("maximum number of steps ({0}) reached")]
    MaxSteps(usize),
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

/// Interpolant over one accepted step.
#[derive(Clone, Debug)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    cont: [State; 8],
}

impl DenseSegment {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> State {
        self.cont[0]
    }

    pub fn end(&self) -> State {
        [self.cont[0][0] + self.cont[1][0], self.cont[0][1] + self.cont[1][1]]
    }

    pub fn eval(&self, t: f64) -> State {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        let mut out = [0.0; 2];
        for i in 0..2 {
            let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
            out[i] = c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s;
        }
        out
    }
}

#[inline]
fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

#[inline]
fn lin(terms: &[(f64, &State)]) -> State {
    let mut out = [0.0; 2];
    for (c, k) in terms {
        out[0] += c * k[0];
        out[1] += c * k[1];
    }
    out
}

fn finite(p: &State) -> bool {
    p[0].is_finite() && p[1].is_finite()
}

/// Stepper state.
pub struct Dop853<'a, F: VectorField + ?Sized> {
    f: &'a F,
    tol: Tolerances,
    t: f64,
    y: State,
    k1: State,
    h: f64,
    dir: f64,
    facold: f64,
    last_rejected: bool,
    steps: usize,
}

const SAFE: f64 = 0.9;
const FACC1: f64 = 1.0 / 0.333;
const FACC2: f64 = 1.0 / 6.0;
const EXPO1: f64 = 1.0 / 8.0;

impl<'a, F: VectorField + ?Sized> Dop853<'a, F> {
    /// Starts at `(t0, y0)` heading in the direction of `dir` (its sign).
    pub fn new(f: &'a F, t0: f64, y0: State, dir: f64, tol: Tolerances) -> Self {
        let dir = if dir < 0.0 { -1.0 } else { 1.0 };
        let k1 = f.eval(y0);
        let mut s = Dop853 { f, tol, t: t0, y: y0, k1, h: 0.0, dir, facold: 1e-4, last_rejected: false, steps: 0 };
        s.h = s.initial_step();
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> State {
        self.y
    }

    fn scale(&self, a: &State, b: &State) -> f64 {
        let n = a[0].abs().max(a[1].abs()).max(b[0].abs()).max(b[1].abs());
        self.tol.atol + self.tol.rtol * n
    }

    fn initial_step(&self) -> f64 {
        let sk = self.scale(&self.y, &self.y);
        let dnf = (self.k1[0] / sk).powi(2) + (self.k1[1] / sk).powi(2);
        let dny = (self.y[0] / sk).powi(2) + (self.y[1] / sk).powi(2);
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
        h = h.min(self.tol.h_max) * self.dir;
        let y1 = axpy(&self.y, &[(1.0, &self.k1)], h);
        let k2 = self.f.eval(y1);
        let der2 = (((k2[0] - self.k1[0]) / sk).powi(2) + ((k2[1] - self.k1[1]) / sk).powi(2)).sqrt() / h.abs();
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 { (h.abs() * 1e-3).max(1e-6) } else { (0.01 / der12).powf(1.0 / 8.0) };
        (100.0 * h.abs()).min(h1).min(self.tol.h_max) * self.dir
    }

    /// Takes one accepted step, never passing `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<DenseSegment, OdeError> {
        loop {
            if self.steps >= self.tol.max_steps {
                return Err(OdeError::MaxSteps(self.tol.max_steps));
            }
            self.steps += 1;
            let mut h = self.h;
            let clamped = (self.t + h - t_stop) * self.dir >= 0.0;
            if clamped {
                h = t_stop - self.t;
            }
            if h.abs() <= 1e-15 * self.t.abs().max(1.0) {
                return Err(OdeError::StepSize { t: self.t });
            }
            let f = self.f;
            let y = &self.y;
            let k1 = self.k1;
            let k2 = f.eval(axpy(y, &[(A21, &k1)], h));
            let k3 = f.eval(axpy(y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = f.eval(axpy(y, &[(A41, &k1), (A43, &k3)], h));
            let k5 = f.eval(axpy(y, &[(A51, &k1), (A53, &k3), (A54, &k4)], h));
            let k6 = f.eval(axpy(y, &[(A61, &k1), (A64, &k4), (A65, &k5)], h));
            let k7 = f.eval(axpy(y, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)], h));
            let k8 = f.eval(axpy(y, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)], h));
            let k9 = f.eval(axpy(y, &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)], h));
            let k10 = f.eval(axpy(
                y,
                &[(A101, &k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)],
                h,
            ));
            let k11 = f.eval(axpy(
                y,
                &[
                    (A111, &k1),
                    (A114, &k4),
                    (A115, &k5),
                    (A116, &k6),
                    (A117, &k7),
                    (A118, &k8),
                    (A119, &k9),
                    (A1110, &k10),
                ],
                h,
            ));
            let yy1 = axpy(
                y,
                &[
                    (A121, &k1),
                    (A124, &k4),
                    (A125, &k5),
                    (A126, &k6),
                    (A127, &k7),
                    (A128, &k8),
                    (A129, &k9),
                    (A1210, &k10),
                    (A1211, &k11),
                ],
                h,
            );
            let k12 = f.eval(yy1);
            let kb = lin(&[
                (B1, &k1),
                (B6, &k6),
                (B7, &k7),
                (B8, &k8),
                (B9, &k9),
                (B10, &k10),
                (B11, &k11),
                (B12, &k12),
            ]);
            let ynew = axpy(y, &[(1.0, &kb)], h);
            if !finite(&ynew) {
                if self.h.abs() < 1e-12 {
                    return Err(OdeError::NonFinite { t: self.t });
                }
                self.h *= 0.25;
                self.last_rejected = true;
                continue;
            }
            let sk = self.scale(y, &ynew);
            let mut err = 0.0;
            let mut err2 = 0.0;
            for i in 0..2 {
                let e2 = kb[i] - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
                err2 += (e2 / sk).powi(2);
                let e = ER1 * k1[i]
                    + ER6 * k6[i]
                    + ER7 * k7[i]
                    + ER8 * k8[i]
                    + ER9 * k9[i]
                    + ER10 * k10[i]
                    + ER11 * k11[i]
                    + ER12 * k12[i];
                err += (e / sk).powi(2);
            }
            let mut deno = err + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h.abs() * err * (1.0 / (deno * 2.0)).sqrt();
            let fac11 = err.powf(EXPO1);
            let fac = FACC2.max(FACC1.min(fac11 / SAFE));
            let mut h_new = h / fac;
            if err <= 1.0 {
                self.facold = err.max(1e-4);
                let knew = f.eval(ynew);
                // Dense output coefficients, with three extra stages.
                let ydiff = [ynew[0] - y[0], ynew[1] - y[1]];
                let bspl = [k1[0] * h - ydiff[0], k1[1] * h - ydiff[1]];
                let c4 = [ydiff[0] - knew[0] * h - bspl[0], ydiff[1] - knew[1] * h - bspl[1]];
                let base = |d: [f64; 8]| {
                    lin(&[
                        (d[0], &k1),
                        (d[1], &k6),
                        (d[2], &k7),
                        (d[3], &k8),
                        (d[4], &k9),
                        (d[5], &k10),
                        (d[6], &k11),
                        (d[7], &k12),
                    ])
                };
                let c5 = base([D41, D46, D47, D48, D49, D410, D411, D412]);
                let c6 = base([D51, D56, D57, D58, D59, D510, D511, D512]);
                let c7 = base([D61, D66, D67, D68, D69, D610, D611, D612]);
                let c8 = base([D71, D76, D77, D78, D79, D710, D711, D712]);
                let k14 = f.eval(axpy(
                    y,
                    &[
                        (A141, &k1),
                        (A147, &k7),
                        (A148, &k8),
                        (A149, &k9),
                        (A1410, &k10),
                        (A1411, &k11),
                        (A1412, &k12),
                        (A1413, &knew),
                    ],
                    h,
                ));
                let k15 = f.eval(axpy(
                    y,
                    &[
                        (A151, &k1),
                        (A156, &k6),
                        (A157, &k7),
                        (A158, &k8),
                        (A1511, &k11),
                        (A1512, &k12),
                        (A1513, &knew),
                        (A1514, &k14),
                    ],
                    h,
                ));
                let k16 = f.eval(axpy(
                    y,
                    &[
                        (A161, &k1),
                        (A166, &k6),
                        (A167, &k7),
                        (A168, &k8),
                        (A169, &k9),
                        (A1613, &knew),
                        (A1614, &k14),
                        (A1615, &k15),
                    ],
                    h,
                ));
                let fin = |c: State, d: [f64; 4]| {
                    let extra = lin(&[(d[0], &knew), (d[1], &k14), (d[2], &k15), (d[3], &k16)]);
                    [(c[0] + extra[0]) * h, (c[1] + extra[1]) * h]
                };
                let seg = DenseSegment {
                    t0: self.t,
                    h,
                    cont: [
                        *y,
                        ydiff,
                        bspl,
                        c4,
                        fin(c5, [D413, D414, D415, D416]),
                        fin(c6, [D513, D514, D515, D516]),
                        fin(c7, [D613, D614, D615, D616]),
                        fin(c8, [D713, D714, D715, D716]),
                    ],
                };
                if self.last_rejected {
                    h_new = if self.dir > 0.0 { h_new.min(h) } else { h_new.max(h) };
                    self.last_rejected = false;
                }
                self.t = if clamped { t_stop } else { self.t + h };
                self.y = ynew;
                self.k1 = knew;
                // Keep the unclamped step size when the step was shortened to land on t_stop.
                self.h = if clamped { h_new.abs().max(self.h.abs()).min(self.tol.h_max) * self.dir } else { h_new.abs().min(self.tol.h_max) * self.dir };
                return Ok(seg);
            }
            h_new = h / FACC1.min(fac11 / SAFE);
            self.h = h_new;
            self.last_rejected = true;
        }
    }
}

/// State at time `t_end` (which may be negative) starting from `y0` at time 0.
pub fn integrate<F: VectorField + ?Sized>(f: &F, y0: State, t_end: f64, tol: Tolerances) -> Result<State, OdeError> {
    if t_end == 0.0 {
        return Ok(y0);
    }
    let mut s = Dop853::new(f, 0.0, y0, t_end, tol);
    while s.t() != t_end {
        s.step(t_end)?;
    }
    Ok(s.y())
}

/// Iterates the time-`dt` map `n` times, continuing while `keep` accepts the new point.
///
/// The result starts with `y0`. An integration failure ends the orbit early and is returned
/// alongside the points computed so far.
pub fn time_map_orbit<F, K>(f: &F, y0: State, dt: f64, n: usize, tol: Tolerances, mut keep: K) -> (Vec<State>, Option<OdeError>)
where
    F: VectorField + ?Sized,
    K: FnMut(&State) -> bool,
{
    let mut out = Vec::with_capacity(n + 1);
    out.push(y0);
    let mut s = Dop853::new(f, 0.0, y0, dt, tol);
    for k in 1..=n {
        let target = dt * k as f64;
        while s.t() != target {
            if let Err(e) = s.step(target) {
                return (out, Some(e));
            }
        }
        let p = s.y();
        out.push(p);
        if !keep(&p) {
            break;
        }
    }
    (out, None)
}

/// Densely sampled trajectory over `[0, t_end]`, `per_step` points per accepted step.
pub fn dense_trajectory<F, K>(f: &F, y0: State, t_end: f64, per_step: usize, tol: Tolerances, mut keep: K) -> Result<Vec<State>, OdeError>
where
    F: VectorField + ?Sized,
    K: FnMut(&State) -> bool,
{
    let mut out = vec![y0];
    let mut s = Dop853::new(f, 0.0, y0, t_end, tol);
    let per = per_step.max(1);
    while s.t() != t_end {
        let seg = s.step(t_end)?;
        for j in 1..=per {
            let t = seg.t0 + seg.h * j as f64 / per as f64;
            out.push(if j == per { seg.end() } else { seg.eval(t) });
        }
        if !keep(&seg.end()) {
            break;
        }
    }
    Ok(out)
}

/// A located zero of an event function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub t: f64,
    pub p: State,
    pub residual: f64,
}

/// Finds the first accepted sign change of `g` along the trajectory, up to `|t| = t_max`.
///
/// The starting point may lie on the event surface. Each candidate root is located by
/// bisection on the dense interpolant and then offered to `accept`.
pub fn locate_event<F, G, A>(f: &F, y0: State, t_max: f64, tol: Tolerances, g: G, mut accept: A) -> Result<Option<Event>, OdeError>
where
    F: VectorField + ?Sized,
    G: Fn(&State) -> f64,
    A: FnMut(&Event) -> bool,
{
    const SUB: usize = 8;
    let mut s = Dop853::new(f, 0.0, y0, t_max, tol);
    let mut prev_t = 0.0;
    let mut prev_g = g(&y0);
    while s.t() != t_max {
        let seg = s.step(t_max)?;
        for j in 1..=SUB {
            let t = seg.t0 + seg.h * j as f64 / SUB as f64;
            let p = if j == SUB { seg.end() } else { seg.eval(t) };
            let gv = g(&p);
            if prev_g != 0.0 && gv != 0.0 && prev_g.signum() != gv.signum() {
                let (mut lo, mut hi, glo) = (prev_t, t, prev_g);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid == lo || mid == hi {
                        break;
                    }
                    let gm = g(&seg.eval(mid));
                    if gm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if gm.signum() == glo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if (hi - lo).abs() <= 1e-15 * hi.abs().max(1.0) {
                        break;
                    }
                }
                let tc = 0.5 * (lo + hi);
                let pc = seg.eval(tc);
                let ev = Event { t: tc, p: pc, residual: g(&pc).abs() };
                if accept(&ev) {
                    return Ok(Some(ev));
                }
            }
            if gv != 0.0 {
                prev_g = gv;
            }
            prev_t = t;
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(p: State) -> State {
        [p[1], -p[0]]
    }

    #[test]
    fn harmonic_oscillator_full_period() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let p = integrate(&rotation, [1.0, 0.0], two_pi, Tolerances::default()).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-11 && p[1].abs() < 1e-11, "{p:?}");
        let back = integrate(&rotation, p, -two_pi, Tolerances::default()).unwrap();
        assert!((back[0] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn dense_output_is_accurate() {
        let lin = |p: State| [p[0], -2.0 * p[1]];
        let mut s = Dop853::new(&lin, 0.0, [1.0, 1.0], 1.0, Tolerances::with_rtol(1e-10));
        let mut worst: f64 = 0.0;
        while s.t() < 2.0 {
            let seg = s.step(2.0).unwrap();
            for j in 0..=10 {
                let t = seg.t0 + seg.h * j as f64 / 10.0;
                let p = seg.eval(t);
                worst = worst.max((p[0] - t.exp()).abs() / t.exp()).max((p[1] - (-2.0 * t).exp()).abs() / t.exp());
            }
        }
        assert!(worst < 1e-9, "dense error {worst}");
    }

    #[test]
    fn unit_map_samples_hit_integer_times() {
        let decay = |p: State| [-p[0], -p[1]];
        let (orbit, err) = time_map_orbit(&decay, [1.0, 0.5], 1.0, 20, Tolerances::default(), |_| true);
        assert!(err.is_none());
        assert_eq!(orbit.len(), 21);
        for (k, p) in orbit.iter().enumerate() {
            assert!((p[0] - (-(k as f64)).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn event_on_axis_crossing() {
        // Starting on the x axis, the next crossing with x > 0 is one full turn later.
        let ev = locate_event(&rotation, [0.5, 0.0], 20.0, Tolerances::default(), |p| p[1], |e| e.p[0] > 0.0)
            .unwrap()
            .unwrap();
        assert!((ev.t - 2.0 * std::f64::consts::PI).abs() < 1e-10, "{}", ev.t);
        assert!((ev.p[0] - 0.5).abs() < 1e-11);
        assert!(ev.residual < 1e-12);
    }
}
