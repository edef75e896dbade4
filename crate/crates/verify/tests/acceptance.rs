//! Acceptance run: one PASS/FAIL line per criterion, with the measured values underneath.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};

use charbox::atlas::{bt_atlas, default_samples, AtlasOptions, Region};
use charbox::classifier::{classify, Kind};
use charbox::cusp_infinity::{infinity_analysis, separatrix_orbit, separatrix_series, Branch, OrbitMode};
use charbox::fractal::*;
use charbox::ode::PolyField;
use charbox::poincare::{poincare_fit, PoincareOptions};
use charbox::series::coeff::{format_rational, int, rat, rational_to_f64};
use charbox::series::surd::QuadSurd;
use charbox::system_model::PlanarSystem;
use charbox::unit_time::{characteristic_dimension, characteristic_map, default_unit_order, picard_unit_time, CharMap};

#[derive(Default)]
struct Checks {
    lines: Vec<String>,
    failed: usize,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.lines.push(format!("ok    {what}"));
        } else {
            self.failed += 1;
            self.lines.push(format!("MISS  {what}"));
        }
    }

    fn near(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, format!("{label}: {got:.4} vs {want:.4} (+-{tol})"));
    }

    fn info(&mut self, what: impl Into<String>) {
        self.lines.push(format!("info  {}", what.into()));
    }

    fn within(&mut self, label: &str, t: Duration, limit: Duration) {
        self.check(t <= limit, format!("{label}: {:.2} s (limit {} s)", t.as_secs_f64(), limit.as_secs_f64()));
    }
}

fn sys(xdot: &[(u32, u32, BigRational)], ydot: &[(u32, u32, BigRational)]) -> PlanarSystem {
    PlanarSystem::from_terms(xdot, ydot, None).unwrap().resolve_order().unwrap()
}

fn corpus(name: &str) -> PlanarSystem {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems").join(name);
    PlanarSystem::from_json_str(&std::fs::read_to_string(p).unwrap()).unwrap().resolve_order().unwrap()
}

fn example1() -> PlanarSystem {
    sys(&[(0, 1, int(1))], &[(5, 0, int(-1)), (2, 1, int(-4))])
}

fn example2() -> PlanarSystem {
    sys(&[(0, 1, int(1)), (2, 0, int(1)), (1, 2, int(1))], &[(3, 0, int(-2)), (1, 1, int(-2)), (0, 3, int(2))])
}

fn char_map(s: &PlanarSystem) -> CharMap {
    let cd = s.char_data().unwrap();
    let u = picard_unit_time(s, default_unit_order(s, &cd)).unwrap();
    characteristic_map(&u, &cd.f).unwrap()
}

fn q(k: u32) -> BigRational {
    int(k as i64)
}

/// Dense integer polynomial product truncated below degree `cap`.
fn pmul(a: &[i64], b: &[i64], cap: usize) -> Vec<i64> {
    let mut out = vec![0; cap];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < cap {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Classical RK4 with a fixed step, on a polynomial field given by float terms.
fn rk4(xdot: &[(u32, u32, f64)], ydot: &[(u32, u32, f64)], p: [f64; 2], t: f64, steps: usize) -> [f64; 2] {
    let ev = |terms: &[(u32, u32, f64)], s: [f64; 2]| terms.iter().map(|&(i, j, c)| c * s[0].powi(i as i32) * s[1].powi(j as i32)).sum::<f64>();
    let f = |s: [f64; 2]| [ev(xdot, s), ev(ydot, s)];
    let h = t / steps as f64;
    let mut s = p;
    for _ in 0..steps {
        let k1 = f(s);
        let k2 = f([s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1]]);
        let k3 = f([s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1]]);
        let k4 = f([s[0] + h * k3[0], s[1] + h * k3[1]]);
        for c in 0..2 {
            s[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
    }
    s
}

fn synthetic(alpha: f64, x0: f64, n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    let mut x = x0;
    for _ in 0..n {
        v.push(x);
        x -= x.powf(alpha);
    }
    v
}

/// Separatrix orbit dimensions in flattened coordinates: (S_x fit, S_y fit, S grid count).
fn orbit_dims(s: &PlanarSystem, sep: &charbox::cusp_infinity::Separatrix) -> Result<[f64; 3], String> {
    let orbit = separatrix_orbit(s, sep, 0.3, OrbitMode::NumericalFlow, &OrbitOptions::default()).map_err(|e| e.to_string())?;
    let flat: Vec<[f64; 2]> = orbit.points.iter().map(|p| sep.to_flat(*p)).collect();
    let xs: Vec<f64> = flat.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = flat.iter().map(|p| p[1]).collect();
    let fx = fit_exponent(&xs, &FitOptions::default()).map_err(|e| format!("S_x: {e}"))?;
    let fy = fit_exponent(&ys, &FitOptions::default()).map_err(|e| format!("S_y: {e}"))?;
    let g = grid_boxcount_dimension(&flat, [0.0, 0.0], &BoxOptions::default()).map_err(|e| format!("S: {e}"))?;
    Ok([fx.estimate, fy.estimate, g.estimate])
}

fn criterion_1(c: &mut Checks) {
    let t = Instant::now();
    let s = example2();
    let cd = s.char_data().unwrap();
    let class = classify(&cd);
    let cm = char_map(&s);
    let dim = characteristic_dimension(&cm).unwrap();
    let elapsed = t.elapsed();

    for (k, want) in [(2, -1), (5, -1), (8, -2), (11, -5)] {
        let got = cd.f.coeff_at(&q(k));
        c.check(got == int(want), format!("f coefficient of x^{k}: {} (want {want})", format_rational(&got)));
    }
    let f9 = cd.big_f.coeff_at(&q(9));
    let f12 = cd.big_f.coeff_at(&q(12));
    c.check(f9 == int(-2), format!("F coefficient of x^9: {} (want -2)", format_rational(&f9)));
    c.check(f12 == int(2), format!("F coefficient of x^12: {} (want 2)", format_rational(&f12)));
    // Independent oracle: B(x, f(x)) with the published curve, in integer arithmetic.
    let cap = 15;
    let mut f = vec![0i64; cap];
    for (k, v) in [(2, -1), (5, -1), (8, -2), (11, -5)] {
        f[k] = v;
    }
    let f3 = pmul(&pmul(&f, &f, cap), &f, cap);
    let mut b = vec![0i64; cap];
    b[3] -= 2;
    for k in 0..cap - 1 {
        b[k + 1] -= 2 * f[k];
    }
    for k in 0..cap {
        b[k] += 2 * f3[k];
    }
    c.info(format!("oracle B(x, f(x)) = {}x^9 + {}x^12 (published curve substituted by hand)", b[9], b[12]));
    c.check(f12 == int(b[12]) && f9 == int(b[9]), "computed F agrees with the oracle at x^9 and x^12");
    for (k, want) in [(4, 7), (7, 14)] {
        let got = cd.big_g.coeff_at(&q(k));
        c.check(got == int(want), format!("G coefficient of x^{k}: {} (want {want})", format_rational(&got)));
    }
    c.check(class.kind == Kind::Node && class.multiplicity == Some(9), format!("classification {class}"));
    let disc = cd.discriminant();
    c.check(disc == Some(int(9)), format!("discriminant {:?} (want 9)", disc.as_ref().map(format_rational)));
    let ch_ok = (1..12).all(|k| {
        let v = cm.ch.coeff_at(&q(k));
        match k {
            1 => v.is_one(),
            9 => v == int(-1),
            _ => v.is_zero(),
        }
    }) && cm.ch.precision() >= q(12);
    c.check(ch_ok, format!("C_h = x - x^9 + O(x^12), valid below x^{}", cm.ch.prec_num()));
    c.check(dim == rat(8, 9), format!("dim_ch = {}", format_rational(&dim)));
    c.within("symbolic pipeline", elapsed, Duration::from_secs(1));
}

fn criterion_2(c: &mut Checks) {
    let t = Instant::now();
    let s = example1();
    let cd = s.char_data().unwrap();
    let class = classify(&cd);
    c.check(
        class.kind == Kind::Node && class.multiplicity == Some(5) && class.case_label == "4.iii3",
        format!("classification {class}"),
    );
    let cm = char_map(&s);
    let ch_ok = (1..6).all(|k| {
        let v = cm.ch.coeff_at(&q(k));
        match k {
            1 => v.is_one(),
            5 => v == rat(-1, 2),
            _ => v.is_zero(),
        }
    });
    c.check(ch_ok, "C_h = x - x^5/2 + O(x^6)");
    c.info(format!("C_h terms {}", cm.to_json()["terms"]));
    let dim = characteristic_dimension(&cm).unwrap();
    c.check(dim == rat(4, 5), format!("dim_ch = {}", format_rational(&dim)));
    let seps = separatrix_series(&s, &cd, &class, None).unwrap();
    c.check(!seps.is_empty(), format!("{} separatrix directions", seps.len()));
    for sep in &seps {
        let lead = sep.leading_coefficient();
        match orbit_dims(&s, sep) {
            Ok([dx, dy, d]) => {
                c.near(&format!("y ~ {lead} x^3: dim S_x"), dx, 2.0 / 3.0, 0.05);
                c.near(&format!("y ~ {lead} x^3: dim S_y"), dy, 0.4, 0.05);
                c.near(&format!("y ~ {lead} x^3: dim S"), d, 2.0 / 3.0, 0.05);
            }
            Err(e) => c.check(false, format!("orbit along y ~ {lead} x^3: {e}")),
        }
    }
    c.within("suite", t.elapsed(), Duration::from_secs(10));
}

fn criterion_3(c: &mut Checks) {
    for (a, m) in [(int(1), 2u32), (int(-2), 3), (rat(3, 2), 5), (int(-1), 4)] {
        let s = sys(&[(0, 1, int(1))], &[(m, 0, a.clone())]);
        let u = picard_unit_time(&s, m).unwrap();
        let (u1, u2) = (u.u1.coeff(m, 0), u.u2.coeff(m, 0));
        let half = &a / int(2);
        c.check(
            u1 == half && u2 == a,
            format!("y' = {} x^{m}: U1 [x^{m}] = {}, U2 [x^{m}] = {}", format_rational(&a), format_rational(&u1), format_rational(&u2)),
        );
    }
    for (b, n) in [(int(1), 1u32), (int(-3), 2), (rat(1, 2), 3)] {
        let s = sys(&[(0, 1, int(1))], &[(n, 1, b.clone())]);
        let u = picard_unit_time(&s, n + 1).unwrap();
        let (u1, u2) = (u.u1.coeff(0, n + 1), u.u2.coeff(0, n + 1));
        let want1 = &b / q(n + 2);
        let want2 = &b / q(n + 1);
        c.check(
            u2 == want2,
            format!("y' = {} x^{n} y: U2 [y^{}] = {} (want b/(n+1) = {})", format_rational(&b), n + 1, format_rational(&u2), format_rational(&want2)),
        );
        c.check(
            u1 == want1,
            format!("y' = {} x^{n} y: U1 [y^{}] = {} (want b/(n+2) = {})", format_rational(&b), n + 1, format_rational(&u1), format_rational(&want1)),
        );
        // Numerical oracle from (0, r): x(1) - r = c r^(n+1) + O(r^(2n+1)).
        let r = 1e-3;
        let end = rk4(&s.xdot().to_f64_terms(), &s.ydot().to_f64_terms(), [0.0, r], 1.0, 4000);
        let oracle = (end[0] - r) / r.powi(n as i32 + 1);
        c.info(format!(
            "  integration oracle for U1 [y^{}]: {oracle:.6}; b/((n+1)(n+2)) = {:.6}",
            n + 1,
            rational_to_f64(&(&b / q((n + 1) * (n + 2))))
        ));
        c.check((oracle - rational_to_f64(&u1)).abs() < 1e-3 * rational_to_f64(&u1).abs().max(1e-3), "  computed U1 coefficient agrees with the integration oracle");
    }
}

fn criterion_4(c: &mut Checks) {
    let k_u = 4;
    for name in ["node_m5.json", "cusp_n1.json", "focus_cubic.json"] {
        let s = corpus(name);
        let u = picard_unit_time(&s, k_u).unwrap();
        let (xd, yd) = (s.xdot().to_f64_terms(), s.ydot().to_f64_terms());
        let mut lr = Vec::new();
        let mut le = Vec::new();
        for e in 4..=9 {
            let r = 2f64.powi(-e);
            let p = [0.8 * r, -0.6 * r];
            let exact = rk4(&xd, &yd, p, 1.0, 2000);
            let (a, b) = u.eval(p[0], p[1]);
            let err = (a - exact[0]).abs().max((b - exact[1]).abs());
            lr.push(r.ln());
            le.push(err.ln());
        }
        let (slope, _, r2) = linear_fit(&lr, &le);
        c.check(slope >= k_u as f64 + 0.5, format!("{name}: error slope {slope:.3} (r2 {r2:.4}) vs K_u + 0.5 = {}", k_u as f64 + 0.5));
    }
}

fn criterion_5(c: &mut Checks) {
    let s = example2();
    let flat = s.flatten().unwrap().resolve_order().unwrap();
    let fcd = flat.char_data().unwrap();
    c.check(fcd.f.is_zero(), "flattened characteristic curve is y = 0");
    let (a, b) = (char_map(&s), char_map(&flat));
    let diffs: Vec<u32> = (1..=11).filter(|&k| a.ch.coeff_at(&q(k)) != b.ch.coeff_at(&q(k))).collect();
    c.check(
        diffs.is_empty() && a.ch.precision() > q(11) && b.ch.precision() > q(11),
        format!("C_h agree through x^11 (differences at {diffs:?})"),
    );
}

fn criterion_6(c: &mut Checks) {
    for alpha in [1.5, 2.0, 3.0, 5.0] {
        let seq = synthetic(alpha, 0.5, 2000);
        let want = 1.0 - 1.0 / alpha;
        match fit_exponent(&seq, &FitOptions::default()) {
            Ok(r) => c.near(&format!("alpha {alpha}: exponent fit"), r.estimate, want, 0.03),
            Err(e) => c.check(false, format!("alpha {alpha}: exponent fit: {e}")),
        }
        match interval_union_dimension(&seq, &LadderOptions::default()) {
            Ok(r) => c.near(&format!("alpha {alpha}: interval union"), r.estimate, want, 0.03),
            Err(e) => c.check(false, format!("alpha {alpha}: interval union: {e}")),
        }
    }
    for (alpha, beta) in [(3.0, 2.0), (2.0, 5.0), (2.0, 2.0)] {
        let xs = synthetic(alpha, 0.5, 2000);
        let ys = synthetic(beta, 0.5, 2000);
        let pts: Vec<[f64; 2]> = xs.iter().zip(&ys).map(|(&x, &y)| [x, y]).collect();
        let want = lemma2_dimension(alpha, beta).unwrap();
        match grid_boxcount_dimension(&pts, [0.0, 0.0], &BoxOptions::default()) {
            Ok(r) => c.near(&format!("pair ({alpha}, {beta}): joint box count"), r.estimate, want, 0.05),
            Err(e) => c.check(false, format!("pair ({alpha}, {beta}): {e}")),
        }
    }
}

fn criterion_7(c: &mut Checks) {
    let t = Instant::now();
    let root = QuadSurd::sqrt(&rat(2, 3)).unwrap();
    for n in 1..=3u32 {
        for sgn in [1i64, -1] {
            let s = sys(&[(0, 1, int(1))], &[(2, 0, int(1)), (n, 1, int(sgn))]);
            let tag = format!("y' = x^2 {} x^{n} y", if sgn > 0 { "+" } else { "-" });
            let cd = s.char_data().unwrap();
            let class = classify(&cd);
            let dim = characteristic_dimension(&char_map(&s)).unwrap();
            c.check(class.kind == Kind::Cusp && dim == rat(1, 2), format!("{tag}: {class}, dim_ch = {}", format_rational(&dim)));
            let seps = separatrix_series(&s, &cd, &class, None).unwrap();
            for sep in &seps {
                let lead = sep.leading_coefficient();
                let want = if sep.branch == Branch::Unstable { root.clone() } else { -root.clone() };
                c.check(lead == want, format!("{tag}: {:?} separatrix leads with {lead}", sep.branch));
                match orbit_dims(&s, sep) {
                    Ok([dx, dy, _]) => {
                        c.near(&format!("{tag}: {:?} dim S_x", sep.branch), dx, 1.0 / 3.0, 0.05);
                        c.near(&format!("{tag}: {:?} dim S_y", sep.branch), dy, 0.25, 0.05);
                    }
                    Err(e) => c.check(false, format!("{tag}: {:?} orbit: {e}", sep.branch)),
                }
            }
            let inf = infinity_analysis(&s).unwrap();
            let want = BigRational::one() - rat(1, n as i64 + 1);
            c.check(inf.chart2_dim == want, format!("{tag}: chart-2 dim {}", format_rational(&inf.chart2_dim)));
            c.check(
                inf.multiplicity_at_infinity == n / 2,
                format!("{tag}: multiplicity at infinity {} (want {})", inf.multiplicity_at_infinity, n / 2),
            );
            match inf.chart2_orbit(0.3, &OrbitOptions::default()).map(|o| fit_exponent(&o.xs(), &FitOptions::default())) {
                Some(Ok(r)) => c.near(&format!("{tag}: chart-2 orbit dim"), r.estimate, rational_to_f64(&want), 0.05),
                Some(Err(e)) => c.check(false, format!("{tag}: chart-2 orbit fit: {e}")),
                None => c.check(false, format!("{tag}: no chart-2 separatrix")),
            }
        }
    }
    c.within("suite", t.elapsed(), Duration::from_secs(10));
}

fn criterion_8(c: &mut Checks) {
    let t = Instant::now();
    let entries = bt_atlas(&default_samples(), &AtlasOptions::default());
    let elapsed = t.elapsed();
    let dim = |e: &charbox::atlas::BTAtlasEntry, set: &str| e.dimensions.iter().find(|d| d.set == set).map(|d| d.report.estimate);
    let need = |c: &mut Checks, label: &str, got: Option<f64>, want: f64, tol: f64| match got {
        Some(v) => c.near(label, v, want, tol),
        None => c.check(false, format!("{label}: missing")),
    };
    for e in &entries {
        let at = format!("({}, {}) {}", e.beta.0, e.beta.1, e.label.label());
        match e.label {
            Region::Origin => {
                need(c, &format!("{at}: S_x"), dim(e, "S_x"), 1.0 / 3.0, 0.05);
                need(c, &format!("{at}: S_y"), dim(e, "S_y"), 0.25, 0.05);
            }
            Region::TMinus | Region::TPlus => {
                need(c, &format!("{at}: S_x"), dim(e, "S_x"), 0.5, 0.05);
                need(c, &format!("{at}: S"), dim(e, "S"), 0.5, 0.05);
            }
            Region::H => {
                need(c, &format!("{at}: Poincare sequence"), dim(e, "poincare_sequence"), 2.0 / 3.0, 0.05);
                need(c, &format!("{at}: spiral"), dim(e, "spiral"), 4.0 / 3.0, 0.1);
            }
            Region::P => {}
            _ => {
                for d in &e.dimensions {
                    c.check(d.report.estimate < 0.1, format!("{at}: {} = {:.4} < 0.1", d.set, d.report.estimate));
                }
            }
        }
    }
    c.within("atlas", elapsed, Duration::from_secs(120));
}

fn criterion_9(c: &mut Checks) {
    let cases = [
        ("(30) x' = y, y' = -x^2 y - x^3", sys(&[(0, 1, int(1))], &[(2, 1, int(-1)), (3, 0, int(-1))])),
        (
            "(31) x' = y + x^2 + x y, y' = x y^2 + x^3 + y^3",
            sys(&[(0, 1, int(1)), (2, 0, int(1)), (1, 1, int(1))], &[(1, 2, int(1)), (3, 0, int(1)), (0, 3, int(1))]),
        ),
    ];
    for (name, s) in cases {
        let cd = s.char_data().unwrap();
        let class = classify(&cd);
        c.info(format!("{name}: {class}"));
        let field = PolyField::from_system(&s);
        let f = cd.f.clone();
        let x1 = 0.2;
        match poincare_fit(&field, &|x| f.eval(x), x1, 300, (x1 / 40.0, x1 / 4.0, 12), &PoincareOptions::default()) {
            Ok((fit, _)) => {
                c.check(
                    fit.k_from_dimension.is_some() && fit.k_from_dimension == fit.k_from_exponent,
                    format!(
                        "{name}: k from dimension {:?} ({:.4}), k from displacement {:?}",
                        fit.k_from_dimension, fit.seq_dim.estimate, fit.k_from_exponent
                    ),
                );
                let p = fit.fitted_exp;
                c.check((p - p.round()).abs() <= 0.1, format!("{name}: displacement exponent {p:.4}"));
            }
            Err(e) => c.check(false, format!("{name}: no return map: {e}")),
        }
    }
    // Not scored: with the sign of x^3 flipped the second system becomes a focus.
    let s = sys(&[(0, 1, int(1)), (2, 0, int(1)), (1, 1, int(1))], &[(1, 2, int(1)), (3, 0, int(-1)), (0, 3, int(1))]);
    let cd = s.char_data().unwrap();
    let f = cd.f.clone();
    let field = PolyField::from_system(&s);
    let x1 = 0.2;
    match poincare_fit(&field, &|x| f.eval(x), x1, 300, (x1 / 40.0, x1 / 4.0, 12), &PoincareOptions::default()) {
        Ok((fit, _)) => c.info(format!(
            "(31) with y' = x y^2 - x^3 + y^3: {}, displacement exponent {:.4}, sequence dim {:.4}, k {:?} / {:?}",
            classify(&cd),
            fit.fitted_exp,
            fit.seq_dim.estimate,
            fit.k_from_dimension,
            fit.k_from_exponent
        )),
        Err(e) => c.info(format!("(31) with y' = x y^2 - x^3 + y^3: {e}")),
    }
}

fn criterion_10(c: &mut Checks) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems");
    let mut names: Vec<String> = std::fs::read_dir(&dir).unwrap().filter_map(|e| e.ok()?.file_name().into_string().ok()).collect();
    names.sort();
    let mut cases = 0;
    for name in names {
        let s = corpus(&name);
        let cd = s.char_data().unwrap();
        let class = classify(&cd);
        let Some(m) = cd.m else { continue };
        if !matches!(class.kind, Kind::Node | Kind::Cusp) {
            continue;
        }
        for sep in separatrix_series(&s, &cd, &class, None).unwrap() {
            let Ok(pred) = theorem3_exact(m, cd.n, &sep.gamma) else { continue };
            cases += 1;
            let tag = format!("{name} gamma {} ({}, {})", format_rational(&sep.gamma), pred.case, if pred.x_dominates { "x" } else { "y" });
            match orbit_dims(&s, &sep) {
                Ok([dx, dy, d]) => {
                    c.near(&format!("{tag}: S_x"), dx, pred.dim_x, 0.05);
                    c.near(&format!("{tag}: S_y"), dy, pred.dim_y, 0.05);
                    c.near(&format!("{tag}: S"), d, pred.dim, 0.05);
                }
                Err(e) => c.check(false, format!("{tag}: {e}")),
            }
        }
    }
    c.check(cases >= 6, format!("{cases} corpus separatrices checked"));
}

type Criterion = (&'static str, fn(&mut Checks));

fn main() {
    let criteria: [Criterion; 10] = [
        ("characteristic data of the curved degree-9 node", criterion_1),
        ("degree-5 node: characteristic map and separatrix dimensions", criterion_2),
        ("unit-time map coefficients", criterion_3),
        ("order of the Picard unit-time map", criterion_4),
        ("characteristic map invariant under flattening", criterion_5),
        ("estimator calibration", criterion_6),
        ("cusp suite and chart at infinity", criterion_7),
        ("Bogdanov-Takens atlas", criterion_8),
        ("Poincare cyclicity consistency", criterion_9),
        ("closed-form separatrix dimensions against brute force", criterion_10),
    ];
    let mut failures = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let mut c = Checks::default();
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut c)));
        if let Err(p) = outcome {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            c.check(false, format!("panicked: {}", msg.unwrap_or_default()));
        }
        let verdict = if c.failed == 0 { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} [{:.2} s] {title}", i + 1, t.elapsed().as_secs_f64());
        for l in &c.lines {
            println!("      {l}");
        }
        if c.failed > 0 {
            failures.push(i + 1);
        }
    }
    println!("\nacceptance: {} of {} criteria pass", criteria.len() - failures.len(), criteria.len());
    if !failures.is_empty() {
        println!("failing criteria: {failures:?}");
        std::process::exit(1);
    }
}
