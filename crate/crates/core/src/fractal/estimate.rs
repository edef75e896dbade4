//! Empirical box-dimension estimators.

use rayon::prelude::*;
use serde::Serialize;

use super::FractalError;
use crate::ode::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExponentFit,
    IntervalUnion,
    GridBoxcount,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub value: f64,
    /// Exact closed form when rational, e.g. `"2/3"`.
    pub exact: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionReport {
    pub estimate: f64,
    pub method: Method,
    pub fit_r2: f64,
    /// `(min, max)` of the scales used: epsilons, or sequence values for the exponent fit.
    pub scale_range: (f64, f64),
    /// Fitted exponent of `x_k - x_{k+1}` against `x_k`.
    pub alpha: Option<f64>,
    pub samples_used: usize,
    pub prediction: Option<Prediction>,
    pub discrepancy: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ladder: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl DimensionReport {
    pub fn with_prediction(mut self, value: f64, exact: Option<String>) -> Self {
        self.discrepancy = Some((self.estimate - value).abs());
        self.prediction = Some(Prediction { value, exact });
        self
    }

    fn new(estimate: f64, method: Method, fit_r2: f64, scale_range: (f64, f64), samples_used: usize) -> Self {
        DimensionReport {
            estimate,
            method,
            fit_r2,
            scale_range,
            alpha: None,
            samples_used,
            prediction: None,
            discrepancy: None,
            ladder: Vec::new(),
            notes: Vec::new(),
        }
    }
}

/// Least-squares line `y = c + s x`; returns `(s, c, r2)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let s = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if sxx > 0.0 && syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };
    (s, my - s * mx, r2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Leading fraction of the sequence discarded as transient.
    pub transient: f64,
    /// Differences at or below this value are treated as underflow and cut from the tail.
    pub underflow: f64,
    pub min_points: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { transient: 0.25, underflow: 1e-13, min_points: 30 }
    }
}

/// Fits `x_k - x_{k+1} ~ x_k^alpha` on `|s_k|` and reports `1 - 1/alpha`.
pub fn fit_exponent(seq: &[f64], opts: &FitOptions) -> Result<DimensionReport, FractalError> {
    let a: Vec<f64> = seq.iter().map(|v| v.abs()).collect();
    // Resolved part: up to the first step lost in underflow. The transient is a fraction of it.
    let mut end = a.len().saturating_sub(1);
    for k in 0..end {
        let d = a[k] - a[k + 1];
        if d.abs() <= opts.underflow || (d <= 0.0 && a[k + 1] == 0.0) {
            end = k;
            break;
        }
        if d < 0.0 {
            return Err(FractalError::NonMonotone { index: k });
        }
    }
    let start = ((end as f64) * opts.transient).floor() as usize;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in start..end {
        xs.push(a[k].ln());
        ys.push((a[k] - a[k + 1]).ln());
    }
    if xs.len() < opts.min_points {
        return Err(FractalError::TooFewPoints { usable: xs.len(), needed: opts.min_points });
    }
    let (alpha, _, r2) = linear_fit(&xs, &ys);
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min).exp();
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp();
    let mut rep = DimensionReport::new(0.0, Method::ExponentFit, r2, (lo, hi), xs.len());
    rep.alpha = Some(alpha);
    if alpha <= 1.0 + 1e-3 {
        rep.notes.push("hyperbolic-like, dimension 0".into());
    } else {
        rep.estimate = 1.0 - 1.0 / alpha;
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderOptions {
    /// Largest epsilon; `None` derives the ladder from the sample's own gaps.
    pub eps0: Option<f64>,
    /// Number of halvings (or geometric steps for the automatic ladder).
    pub levels: usize,
    /// Add the gap between the last sample and the limit, standing in for the unsampled tail.
    pub tail_closure: bool,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions { eps0: None, levels: 10, tail_closure: true }
    }
}

fn geometric(hi: f64, lo: f64, levels: usize) -> Vec<f64> {
    let levels = levels.max(2);
    (0..=levels).map(|i| hi * (lo / hi).powf(i as f64 / levels as f64)).collect()
}

/// Keeps the usable part of the ladder between the resolution limits `lo` and `hi`.
fn choose_ladder(opts: &LadderOptions, lo: f64, hi: f64, notes: &mut Vec<String>) -> Result<Vec<f64>, FractalError> {
    if !(lo > 0.0 && hi > lo) {
        return Err(FractalError::Resolution(format!("no usable epsilon range: lo = {lo:e}, hi = {hi:e}")));
    }
    match opts.eps0 {
        None => Ok(geometric(hi, lo, opts.levels)),
        Some(e0) => {
            let full: Vec<f64> = (0..=opts.levels).map(|i| e0 * 0.5f64.powi(i as i32)).collect();
            let kept: Vec<f64> = full.iter().cloned().filter(|&e| e >= lo * 0.999 && e <= hi * 1.001).collect();
            if kept.len() < full.len() {
                notes.push(format!(
                    "ladder auto-shrunk to {} of {} levels within sample resolution [{lo:e}, {hi:e}]",
                    kept.len(),
                    full.len()
                ));
            }
            if kept.len() < 3 {
                notes.push("requested ladder outside the sample resolution; using the automatic ladder".into());
                return Ok(geometric(hi, lo, opts.levels));
            }
            Ok(kept)
        }
    }
}

fn finish(ladder: Vec<(f64, f64)>, method: Method, codim: f64, samples: usize, notes: Vec<String>) -> DimensionReport {
    let lx: Vec<f64> = ladder.iter().map(|(e, _)| e.ln()).collect();
    let ly: Vec<f64> = ladder.iter().map(|(_, m)| m.ln()).collect();
    let (slope, _, r2) = linear_fit(&lx, &ly);
    let lo = ladder.iter().map(|l| l.0).fold(f64::INFINITY, f64::min);
    let hi = ladder.iter().map(|l| l.0).fold(0.0, f64::max);
    let mut rep = DimensionReport::new((codim - slope).max(0.0), method, r2, (lo, hi), samples);
    rep.ladder = ladder;
    rep.notes = notes;
    rep
}

/// Total length of the union of `[a_k - eps, a_k + eps]` for `a` sorted descending.
fn union_length(a: &[f64], eps: f64, closure: bool) -> f64 {
    let mut total = 0.0;
    let mut cur_lo = f64::NAN;
    let mut cur_hi = f64::NAN;
    let mut push = |lo: f64, hi: f64, total: &mut f64| {
        if cur_lo.is_nan() {
            cur_lo = lo;
            cur_hi = hi;
        } else if hi >= cur_lo {
            cur_lo = cur_lo.min(lo);
        } else {
            *total += cur_hi - cur_lo;
            cur_lo = lo;
            cur_hi = hi;
        }
    };
    for &v in a {
        push(v - eps, v + eps, &mut total);
    }
    if closure {
        let last = *a.last().unwrap_or(&0.0);
        push(-eps, last + eps, &mut total);
    }
    if !cur_lo.is_nan() {
        total += cur_hi - cur_lo;
    }
    total
}

/// Half-gaps of a descending sequence: at index `n/16` and at the tail.
fn gap_bounds(a: &[f64]) -> (f64, f64) {
    let gaps: Vec<f64> = a.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    if gaps.is_empty() {
        return (0.0, 0.0);
    }
    let head = gaps[gaps.len() / 16];
    let tail_region = &gaps[gaps.len() - gaps.len().min(4)..];
    let tail = tail_region.iter().cloned().fold(0.0, f64::max);
    (0.5 * tail, 0.5 * head)
}

/// Box dimension of the scalar set `{|s_k|}` from the measure of its epsilon-neighbourhood.
pub fn interval_union_dimension(seq: &[f64], opts: &LadderOptions) -> Result<DimensionReport, FractalError> {
    let mut a: Vec<f64> = seq.iter().map(|v| v.abs()).filter(|v| v.is_finite()).collect();
    if a.len() < 8 {
        return Err(FractalError::TooFewPoints { usable: a.len(), needed: 8 });
    }
    a.sort_by(|x, y| y.partial_cmp(x).unwrap());
    a.dedup();
    let (lo, hi) = gap_bounds(&a);
    let mut notes = Vec::new();
    let lo = lo.max(hi * 1e-12);
    let eps = choose_ladder(opts, lo, hi, &mut notes)?;
    let ladder: Vec<(f64, f64)> = eps.par_iter().map(|&e| (e, union_length(&a, e, opts.tail_closure))).collect();
    Ok(finish(ladder, Method::IntervalUnion, 1.0, a.len(), notes))
}

/// How the unsampled remainder of a planar set near its limit is represented.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    None,
    /// Segment from the last sample to the limit point.
    Segment,
    /// Disk of the given radius around the limit point.
    Disk(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxOptions {
    pub eps0: Option<f64>,
    /// Smallest epsilon, for explicitly specified ladders.
    pub eps_min: Option<f64>,
    pub levels: usize,
    /// Treat the samples as a polyline rather than isolated points.
    pub polyline: bool,
    pub closure: Closure,
}

impl Default for BoxOptions {
    fn default() -> Self {
        BoxOptions { eps0: None, eps_min: None, levels: 10, polyline: false, closure: Closure::Segment }
    }
}

enum Shape {
    Point(State),
    Segment(State, State),
    Disk(State, f64),
}

impl Shape {
    /// `(xmin, xmax)` of the `eps`-neighbourhood.
    fn x_span(&self, eps: f64) -> (f64, f64) {
        match self {
            Shape::Point(p) => (p[0] - eps, p[0] + eps),
            Shape::Segment(a, b) => (a[0].min(b[0]) - eps, a[0].max(b[0]) + eps),
            Shape::Disk(c, r) => (c[0] - r - eps, c[0] + r + eps),
        }
    }

    /// Intersection of the `eps`-neighbourhood with the line `x = cx`. The neighbourhood
    /// is convex, so this is one interval.
    fn column(&self, cx: f64, eps: f64) -> Option<(f64, f64)> {
        let disk = |c: &State, r: f64| {
            let dx = (cx - c[0]).abs();
            (dx <= r).then(|| {
                let w = (r * r - dx * dx).sqrt();
                (c[1] - w, c[1] + w)
            })
        };
        match self {
            Shape::Point(p) => disk(p, eps),
            Shape::Disk(c, r) => disk(c, r + eps),
            Shape::Segment(a, b) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                let mut take = |iv: Option<(f64, f64)>| {
                    if let Some((l, h)) = iv {
                        lo = lo.min(l);
                        hi = hi.max(h);
                    }
                };
                take(disk(a, eps));
                take(disk(b, eps));
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = dx.hypot(dy);
                if len > 0.0 {
                    let (nx, ny) = (-dy / len * eps, dx / len * eps);
                    let q = [[a[0] + nx, a[1] + ny], [b[0] + nx, b[1] + ny], [b[0] - nx, b[1] - ny], [a[0] - nx, a[1] - ny]];
                    for k in 0..4 {
                        let (p0, p1) = (q[k], q[(k + 1) % 4]);
                        let (s0, s1) = (p0[0] - cx, p1[0] - cx);
                        if s0 * s1 > 0.0 {
                            continue;
                        }
                        if s0 == s1 {
                            take(Some((p0[1].min(p1[1]), p0[1].max(p1[1]))));
                        } else {
                            let y = p0[1] + (cx - p0[0]) / (p1[0] - p0[0]) * (p1[1] - p0[1]);
                            take(Some((y, y)));
                        }
                    }
                }
                (lo <= hi).then_some((lo, hi))
            }
        }
    }
}

const STRIPE: i64 = 2048;

/// Area of the cells of side `eps/2` whose centres lie within `eps` of the shapes.
///
/// Columns are handled in stripes: each column collects one `y`-interval of cell indices
/// per shape, and the merged interval lengths are summed.
fn covered_area(shapes: &[Shape], eps: f64) -> f64 {
    let h = 0.5 * eps;
    let spans: Vec<(i64, i64)> = shapes
        .iter()
        .map(|s| {
            let (a, b) = s.x_span(eps);
            ((a / h - 0.5).ceil() as i64, (b / h - 0.5).floor() as i64)
        })
        .collect();
    let i0 = spans.iter().map(|s| s.0).min().unwrap_or(0);
    let i1 = spans.iter().map(|s| s.1).max().unwrap_or(-1);
    if i1 < i0 {
        return 0.0;
    }
    // Only occupied stripes are visited; at fine scales the span holds billions of columns.
    let mut pairs: Vec<(i64, usize)> = Vec::new();
    for (k, &(a, b)) in spans.iter().enumerate() {
        if b < a {
            continue;
        }
        pairs.extend((((a - i0) / STRIPE)..=((b - i0) / STRIPE)).map(|st| (st, k)));
    }
    pairs.sort_unstable();
    let groups: Vec<&[(i64, usize)]> = pairs.chunk_by(|x, y| x.0 == y.0).collect();
    let cells: u64 = groups
        .par_iter()
        .map(|group| {
            let st = group[0].0;
            let c0 = i0 + st * STRIPE;
            let c1 = (c0 + STRIPE - 1).min(i1);
            let mut cols: Vec<Vec<(i64, i64)>> = vec![Vec::new(); (c1 - c0 + 1) as usize];
            for &(_, k) in group.iter() {
                let (a, b) = spans[k];
                for i in a.max(c0)..=b.min(c1) {
                    let cx = (i as f64 + 0.5) * h;
                    if let Some((lo, hi)) = shapes[k].column(cx, eps) {
                        let (jl, jh) = ((lo / h - 0.5).ceil() as i64, (hi / h - 0.5).floor() as i64);
                        if jl <= jh {
                            cols[(i - c0) as usize].push((jl, jh));
                        }
                    }
                }
            }
            cols.iter_mut().map(|c| merged_count(c)).sum::<u64>()
        })
        .sum();
    cells as f64 * h * h
}

fn merged_count(iv: &mut [(i64, i64)]) -> u64 {
    iv.sort_unstable();
    let mut total = 0u64;
    let mut cur: Option<(i64, i64)> = None;
    for &(l, h) in iv.iter() {
        cur = match cur {
            Some((cl, ch)) if l <= ch + 1 => Some((cl, ch.max(h))),
            Some((cl, ch)) => {
                total += (ch - cl + 1) as u64;
                Some((l, h))
            }
            None => Some((l, h)),
        };
    }
    if let Some((cl, ch)) = cur {
        total += (ch - cl + 1) as u64;
    }
    total
}

/// Planar box dimension by occupancy of cells of side `eps/2` whose centres lie within
/// `eps` of the set.
pub fn grid_boxcount_dimension(points: &[State], limit: State, opts: &BoxOptions) -> Result<DimensionReport, FractalError> {
    if points.len() < 8 {
        return Err(FractalError::TooFewPoints { usable: points.len(), needed: 8 });
    }
    let mut notes = Vec::new();
    let eps = match (opts.eps0, opts.eps_min) {
        (Some(hi), Some(lo)) => geometric(hi, lo, opts.levels),
        _ => {
            let gaps: Vec<f64> =
                points.windows(2).map(|w| (w[0][0] - w[1][0]).hypot(w[0][1] - w[1][1])).collect();
            let head = 0.5 * gaps[gaps.len() / 16];
            let tail = 0.5 * gaps[gaps.len() - gaps.len().min(4)..].iter().cloned().fold(0.0, f64::max);
            let tail = tail.max(head * 1e-12);
            choose_ladder(&LadderOptions { eps0: opts.eps0, levels: opts.levels, tail_closure: true }, tail, head, &mut notes)?
        }
    };
    let mut shapes: Vec<Shape> = if opts.polyline {
        points.windows(2).map(|w| Shape::Segment(w[0], w[1])).collect()
    } else {
        points.iter().map(|p| Shape::Point(*p)).collect()
    };
    match opts.closure {
        Closure::None => {}
        Closure::Segment => shapes.push(Shape::Segment(*points.last().unwrap(), limit)),
        Closure::Disk(r) => shapes.push(Shape::Disk(limit, r)),
    }
    let ladder: Vec<(f64, f64)> = eps.par_iter().map(|&e| (e, covered_area(&shapes, e))).collect();
    Ok(finish(ladder, Method::GridBoxcount, 2.0, points.len(), notes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(alpha: f64, x0: f64, n: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(n);
        let mut x = x0;
        for _ in 0..n {
            v.push(x);
            x -= x.powf(alpha);
        }
        v
    }

    #[test]
    fn quadratic_sequence() {
        let s = synthetic(2.0, 0.5, 2000);
        let r = fit_exponent(&s, &FitOptions::default()).unwrap();
        assert!((r.estimate - 0.5).abs() < 0.01, "{r:?}");
        assert!(r.fit_r2 > 0.99);
        let r = interval_union_dimension(&s, &LadderOptions::default()).unwrap();
        assert!((r.estimate - 0.5).abs() < 0.03, "{}", r.estimate);
    }

    #[test]
    fn geometric_sequence_has_dimension_zero() {
        let s: Vec<f64> = (0..200).map(|k| 0.8f64.powi(k)).collect();
        let r = fit_exponent(&s, &FitOptions::default()).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert!(r.notes[0].contains("hyperbolic"));
        // |A_eps| ~ eps log(1/eps): the log factor biases finite ladders upward.
        let r = interval_union_dimension(&s, &LadderOptions::default()).unwrap();
        assert!(r.estimate < 0.1, "{}", r.estimate);
    }

    #[test]
    fn rejects_non_monotone() {
        let mut s = synthetic(2.0, 0.5, 200);
        s[150] = s[149] * 1.5;
        assert!(matches!(fit_exponent(&s, &FitOptions::default()), Err(FractalError::NonMonotone { .. })));
        assert!(matches!(fit_exponent(&s[..20], &FitOptions::default()), Err(FractalError::TooFewPoints { .. })));
    }

    #[test]
    fn explicit_ladder_is_shrunk() {
        let s = synthetic(2.0, 0.5, 2000);
        let r = interval_union_dimension(&s, &LadderOptions { eps0: Some(0.125), levels: 20, tail_closure: true }).unwrap();
        assert!(r.notes.iter().any(|n| n.contains("auto-shrunk")));
        assert!((r.estimate - 0.5).abs() < 0.05, "{}", r.estimate);
    }

    #[test]
    fn segment_is_one_dimensional() {
        let pts: Vec<State> = (0..200).map(|k| [k as f64 / 200.0, 0.0]).collect();
        let opts = BoxOptions { eps0: Some(0.05), eps_min: Some(0.002), levels: 8, polyline: true, closure: Closure::None };
        let r = grid_boxcount_dimension(&pts, [0.0, 0.0], &opts).unwrap();
        assert!((r.estimate - 1.0).abs() < 0.05, "{}", r.estimate);
    }

    #[test]
    fn union_length_merges() {
        let a = [1.0, 0.5, 0.45];
        assert!((union_length(&a, 0.1, false) - (0.2 + 0.25)).abs() < 1e-12);
        assert!((union_length(&a, 0.1, true) - (0.2 + 0.7)).abs() < 1e-12);
    }
}
