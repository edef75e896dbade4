//! JSON reports and CSV sidecars for each analysis command.

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::classifier::{classify, cusp_cyclicity_bound, node_cyclicity_lower_bound, Kind, SingularityClass};
use crate::cusp_infinity::{cusp_dimensions, infinity_analysis, separatrix_orbit, separatrix_series, OrbitMode, Separatrix};
use crate::fractal::{
    fit_exponent, grid_boxcount_dimension, interval_union_dimension, theorem3_exact, BoxOptions, DimensionReport, FitOptions,
    LadderOptions, OrbitOptions, OrbitSample,
};
use crate::ode::{PolyField, Tolerances};
use crate::poincare::{cyclicity_bound, focus_conditions, poincare_fit, PoincareOptions};
use crate::series::coeff::{format_rational, rational_to_f64};
use crate::system_model::{CharData, ModelError, PlanarSystem};
use crate::unit_time::{
    characteristic_dimension, characteristic_map, default_unit_order, degree_warning, picard_unit_time, structure_check, CharMap,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<ModelError> for ReportError {
    fn from(e: ModelError) -> Self {
        ReportError::Input(e.to_string())
    }
}

fn numerical<E: std::fmt::Display>(context: &str) -> impl Fn(E) -> ReportError + '_ {
    move |e| ReportError::Numerical(format!("{context}: {e}"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions {
    /// Truncation order `K`; `None` picks it from the leading exponents.
    pub order: Option<u32>,
    pub orbit_n: usize,
    /// Starting abscissa for orbits and return maps; `None` uses 0.3 (0.2 for return maps).
    pub x0: Option<f64>,
    pub rtol: f64,
    pub eps0: Option<f64>,
    pub eps_levels: usize,
    pub poincare_n: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { order: None, orbit_n: 2000, x0: None, rtol: 1e-12, eps0: None, eps_levels: 10, poincare_n: 300 }
    }
}

impl AnalysisOptions {
    fn tol(&self) -> Tolerances {
        Tolerances::with_rtol(self.rtol)
    }

    fn orbit(&self) -> OrbitOptions {
        OrbitOptions { n: self.orbit_n, tol: self.tol(), ..Default::default() }
    }
}

/// A report plus named CSV sidecars.
#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub report: Value,
    pub csv: Vec<(String, String)>,
}

struct Context {
    sys: PlanarSystem,
    cd: CharData,
    class: SingularityClass,
    report: serde_json::Map<String, Value>,
    warnings: Vec<String>,
    csv: Vec<(String, String)>,
}

impl Context {
    fn new(command: &str, sys: &PlanarSystem, opts: &AnalysisOptions) -> Result<Self, ReportError> {
        let sys = match opts.order {
            Some(k) => sys.with_order(k),
            None => sys.resolve_order()?,
        };
        let cd = sys.char_data()?;
        let class = classify(&cd);
        log::debug!("{command}: order {} gives {:?} (case {})", cd.order, class.kind, class.case_label);
        let mut report = serde_json::Map::new();
        report.insert("schema_version".into(), json!(SCHEMA_VERSION));
        report.insert("command".into(), json!(command));
        report.insert("system".into(), sys.to_json());
        report.insert("char_data".into(), cd.to_json());
        report.insert("classification".into(), serde_json::to_value(&class).unwrap_or(Value::Null));
        let mut warnings = Vec::new();
        if cd.f_is_zero() {
            warnings.push(format!("F is identically zero through order {}", cd.order));
        }
        if cd.m.is_some() && cd.n.is_none() {
            warnings.push(format!("G is identically zero through order {}", cd.order));
        }
        let bound = match class.kind {
            Kind::Node => class.multiplicity.and_then(|m| node_cyclicity_lower_bound(m).ok()).map(|l| json!({"node_limit_cycles_at_least": l})),
            Kind::Cusp => cd.n.and_then(|n| cusp_cyclicity_bound(n).ok()).map(|l| json!({"cusp_limit_cycles_at_most": l})),
            _ => None,
        };
        if let Some(b) = bound {
            report.insert("cyclicity".into(), b);
        }
        Ok(Context { sys, cd, class, report, warnings, csv: Vec::new() })
    }

    fn finish(mut self) -> Analysis {
        self.report.insert("warnings".into(), json!(self.warnings));
        Analysis { report: Value::Object(self.report), csv: self.csv }
    }

    /// `C_h` and its dimension, exact, with an empirical estimate from iterating `C_h`.
    fn char_map(&mut self, opts: &AnalysisOptions) -> Result<Option<CharMap>, ReportError> {
        if self.cd.f_is_zero() {
            self.warnings.push("characteristic map undetermined: F vanishes to the working order".into());
            return Ok(None);
        }
        let k_u = default_unit_order(&self.sys, &self.cd);
        let u = picard_unit_time(&self.sys, k_u).map_err(numerical("unit-time map"))?;
        let cm = characteristic_map(&u, &self.cd.f).map_err(numerical("characteristic map"))?;
        let mut entry = cm.to_json();
        entry["unit_order"] = json!(k_u);
        match characteristic_dimension(&cm) {
            Ok(d) => {
                entry["dim_ch"] = json!(format_rational(&d));
                match char_map_orbit(&cm, opts) {
                    Some(seq) => {
                        self.csv.push(("char_map_orbit.csv".into(), scalar_csv(&seq)));
                        match fit_exponent(&seq, &FitOptions::default()) {
                            Ok(r) => entry["dim_ch_empirical"] = report_json(r.with_prediction(rational_to_f64(&d), Some(format_rational(&d)))),
                            Err(e) => self.warnings.push(format!("dim_ch empirical estimate failed: {e}")),
                        }
                    }
                    None => self.warnings.push("characteristic map orbit does not approach 0 on either side".into()),
                }
            }
            Err(e) => self.warnings.push(e.to_string()),
        }
        if let Some(w) = degree_warning(&self.sys, &self.cd) {
            self.warnings.push(w);
        }
        self.report.insert("char_map".into(), entry);
        Ok(Some(cm))
    }
}

fn report_json(r: DimensionReport) -> Value {
    serde_json::to_value(r).unwrap_or(Value::Null)
}

fn scalar_csv(seq: &[f64]) -> String {
    let mut s = String::from("k,x\n");
    for (k, x) in seq.iter().enumerate() {
        s.push_str(&format!("{k},{x:e}\n"));
    }
    s
}

fn ladder_csv(r: &DimensionReport) -> String {
    let mut s = String::from("eps,measure\n");
    for (e, m) in &r.ladder {
        s.push_str(&format!("{e:e},{m:e}\n"));
    }
    s
}

/// Iterates the truncated `C_h` from whichever side it contracts.
fn char_map_orbit(cm: &CharMap, opts: &AnalysisOptions) -> Option<Vec<f64>> {
    let x0 = opts.x0.unwrap_or(0.1).abs();
    let side = [x0, -x0].into_iter().find(|&x| cm.ch.eval(x).abs() < x.abs())?;
    let mut seq = vec![side];
    let mut x = side;
    for _ in 0..opts.orbit_n {
        x = cm.ch.eval(x);
        if !x.is_finite() || x.abs() < 1e-300 {
            break;
        }
        seq.push(x);
    }
    Some(seq)
}

pub fn classify_report(sys: &PlanarSystem, opts: &AnalysisOptions) -> Result<Analysis, ReportError> {
    let mut cx = Context::new("classify", sys, opts)?;
    cx.report.insert("discriminant".into(), json!(crate::classifier::discriminant(&cx.cd).as_ref().map(format_rational)));
    Ok(cx.finish())
}

pub fn unitmap_report(sys: &PlanarSystem, opts: &AnalysisOptions) -> Result<Analysis, ReportError> {
    let mut cx = Context::new("unitmap", sys, opts)?;
    let k_u = default_unit_order(&cx.sys, &cx.cd);
    let u = picard_unit_time(&cx.sys, k_u).map_err(numerical("unit-time map"))?;
    let sc = structure_check(&cx.sys, &cx.cd, &u);
    cx.report.insert("unit_map".into(), u.to_json());
    cx.report.insert(
        "structure_check".into(),
        json!({"applicable": sc.applicable, "case": sc.case, "holds": sc.holds, "detail": sc.detail}),
    );
    cx.char_map(opts)?;
    let mut rows = String::from("component,i,j,coeff\n");
    for (name, s) in [("U1", &u.u1), ("U2", &u.u2)] {
        for (i, j, c) in s.terms() {
            rows.push_str(&format!("{name},{i},{j},{}\n", format_rational(c)));
        }
    }
    cx.csv.push(("unit_map.csv".into(), rows));
    Ok(cx.finish())
}

/// Closed-form `(x, y, joint)` dimensions for a separatrix, in flattened coordinates.
fn predictions(cx: &Context, sep: &Separatrix) -> Option<([f64; 3], [String; 3], Value)> {
    let m = cx.cd.m?;
    match cx.class.kind {
        Kind::Cusp => {
            let d = cusp_dimensions(m).ok()?;
            let s = [format_rational(&d[0]), format_rational(&d[1]), format_rational(&d[2])];
            Some(([rational_to_f64(&d[0]), rational_to_f64(&d[1]), rational_to_f64(&d[2])], s, json!({"source": "cusp separatrix"})))
        }
        Kind::Node => {
            let t = theorem3_exact(m, cx.cd.n, &sep.gamma).ok()?;
            let exact = t.exact.clone()?;
            Some(([t.dim_x, t.dim_y, t.dim], exact, serde_json::to_value(&t).ok()?))
        }
        _ => None,
    }
}

pub fn dimension_report(sys: &PlanarSystem, opts: &AnalysisOptions) -> Result<Analysis, ReportError> {
    let mut cx = Context::new("dimension", sys, opts)?;
    cx.char_map(opts)?;
    if !matches!(cx.class.kind, Kind::Node | Kind::Cusp) {
        cx.warnings.push(format!("no separatrix orbits for a {:?}", cx.class.kind));
        return Ok(cx.finish());
    }
    let seps = separatrix_series(&cx.sys, &cx.cd, &cx.class, None).map_err(numerical("separatrix series"))?;
    let x0 = opts.x0.unwrap_or(0.3);
    let mut out = Vec::new();
    for (idx, sep) in seps.iter().enumerate() {
        let mut entry = sep.to_json();
        let tag = format!("separatrix_{idx}");
        let orbit = match separatrix_orbit(&cx.sys, sep, x0, OrbitMode::NumericalFlow, &opts.orbit()) {
            Ok(o) => o,
            Err(e) => {
                cx.warnings.push(format!("{tag}: orbit failed: {e}"));
                out.push(entry);
                continue;
            }
        };
        cx.csv.push((format!("{tag}_orbit.csv"), orbit.to_csv()));
        let flat: Vec<[f64; 2]> = orbit.points.iter().map(|p| sep.to_flat(*p)).collect();
        let flat_orbit = OrbitSample::new(flat, orbit.source);
        let pred = predictions(&cx, sep);
        let mut dims = serde_json::Map::new();
        let fit = FitOptions::default();
        let ladder = LadderOptions { eps0: opts.eps0, levels: opts.eps_levels, tail_closure: true };
        for (k, (name, seq)) in [("S_x", flat_orbit.xs()), ("S_y", flat_orbit.ys())].into_iter().enumerate() {
            let attach = |r: DimensionReport| match &pred {
                Some((v, s, _)) => r.with_prediction(v[k], Some(s[k].clone())),
                None => r,
            };
            let mut pair = serde_json::Map::new();
            match fit_exponent(&seq, &fit) {
                Ok(r) => {
                    pair.insert("exponent_fit".into(), report_json(attach(r)));
                }
                Err(e) => cx.warnings.push(format!("{tag} {name} exponent fit: {e}")),
            }
            match interval_union_dimension(&seq, &ladder) {
                Ok(r) => {
                    cx.csv.push((format!("{tag}_{name}_ladder.csv"), ladder_csv(&r)));
                    pair.insert("interval_union".into(), report_json(attach(r)));
                }
                Err(e) => cx.warnings.push(format!("{tag} {name} interval union: {e}")),
            }
            dims.insert(name.into(), Value::Object(pair));
        }
        let bopts = BoxOptions { eps0: opts.eps0, levels: opts.eps_levels, ..Default::default() };
        match grid_boxcount_dimension(&flat_orbit.points, [0.0, 0.0], &bopts) {
            Ok(r) => {
                let r = match &pred {
                    Some((v, s, _)) => r.with_prediction(v[2], Some(s[2].clone())),
                    None => r,
                };
                cx.csv.push((format!("{tag}_S_ladder.csv"), ladder_csv(&r)));
                dims.insert("S".into(), json!({"grid_boxcount": report_json(r)}));
            }
            Err(e) => cx.warnings.push(format!("{tag} joint box count: {e}")),
        }
        if let Some((_, _, detail)) = pred {
            entry["prediction"] = detail;
        }
        entry["coordinates"] = json!("flattened: (x, y - f(x))");
        entry["orbit_warnings"] = json!(orbit.warnings);
        entry["dimensions"] = Value::Object(dims);
        out.push(entry);
    }
    cx.report.insert("separatrices".into(), Value::Array(out));
    Ok(cx.finish())
}

pub fn poincare_report(sys: &PlanarSystem, opts: &AnalysisOptions) -> Result<Analysis, ReportError> {
    let mut cx = Context::new("poincare", sys, opts)?;
    let fc = focus_conditions(&cx.cd);
    cx.report.insert("focus_conditions".into(), serde_json::to_value(&fc).unwrap_or(Value::Null));
    if cx.class.kind != Kind::CenterOrFocus {
        cx.warnings.push(format!("classified as {:?}, not a centre or focus; return map attempted anyway", cx.class.kind));
    }
    let x1 = opts.x0.unwrap_or(0.2);
    let field = PolyField::from_system(&cx.sys);
    let f = cx.cd.f.clone();
    let popts = PoincareOptions { tol: opts.tol(), ..Default::default() };
    let monodromic = cx.class.kind == Kind::CenterOrFocus;
    let (fit, seq) = poincare_fit(&field, &|x| f.eval(x), x1, opts.poincare_n, (x1 / 40.0, x1 / 4.0, 12), &popts)
        .map_err(|e| {
            if monodromic {
                numerical("return map")(e)
            } else {
                ReportError::Input(format!("classified as {:?}, no return map: {e}", cx.class.kind))
            }
        })?;
    cx.csv.push(("poincare_sequence.csv".into(), scalar_csv(&seq.xs())));
    cx.csv.push(("displacement.csv".into(), fit.displacement_csv()));
    let mut entry = fit.to_json();
    match cyclicity_bound(&fit) {
        Ok(k) => entry["cyclicity_bound"] = json!(k),
        Err(e) => {
            entry["cyclicity_bound"] = Value::Null;
            cx.warnings.push(e.to_string());
        }
    }
    entry["sequence_warnings"] = json!(seq.warnings);
    entry["justification"] = json!("at most k limit cycles bifurcate when the return sequence has dimension 1 - 1/(2k+1)");
    cx.report.insert("poincare".into(), entry);
    Ok(cx.finish())
}

pub fn infinity_report(sys: &PlanarSystem, opts: &AnalysisOptions) -> Result<Analysis, ReportError> {
    let mut cx = Context::new("infinity", sys, opts)?;
    let inf = infinity_analysis(&cx.sys).map_err(|e| ReportError::Input(e.to_string()))?;
    let mut entry = inf.to_json();
    let u0 = opts.x0.unwrap_or(0.3);
    match inf.chart2_orbit(u0, &opts.orbit()) {
        Some(orbit) => {
            cx.csv.push(("chart2_orbit.csv".into(), orbit.to_csv()));
            let d: &BigRational = &inf.chart2_dim;
            match fit_exponent(&orbit.xs(), &FitOptions::default()) {
                Ok(r) => entry["chart2_dim_empirical"] = report_json(r.with_prediction(rational_to_f64(d), Some(format_rational(d)))),
                Err(e) => cx.warnings.push(format!("chart-2 orbit fit: {e}")),
            }
        }
        None => cx.warnings.push("no chart-2 separatrix to iterate".into()),
    }
    cx.report.insert("infinity".into(), entry);
    Ok(cx.finish())
}
