//! Planar systems in nilpotent normal form `x' = y + A(x,y)`, `y' = B(x,y)`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::series::coeff::{format_rational, parse_rational};
use crate::series::{solve_implicit, substitute_y, PuiseuxSeries1, SeriesError, TruncSeries2};

/// Smallest truncation order used when none is requested.
pub const MIN_DEFAULT_ORDER: u32 = 12;
/// Upper bound for the automatic order search.
pub const MAX_AUTO_ORDER: u32 = 48;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("cannot parse coefficient `{0}`")]
    BadCoefficient(String),
    #[error("not in nilpotent normal form: {0}")]
    NotNormalForm(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// A validated system. The polynomials are kept exactly; `order` is the truncation
/// order `K` used by the symbolic pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarSystem {
    name: Option<String>,
    xdot: TruncSeries2,
    ydot: TruncSeries2,
    order: u32,
    order_explicit: bool,
    params: BTreeMap<String, BigRational>,
}

impl PlanarSystem {
    /// Builds a system from `x'` and `y'`, checking the normal form.
    ///
    /// The truncation orders of the inputs are ignored: their terms are taken as exact.
    pub fn new(xdot: TruncSeries2, ydot: TruncSeries2, order: Option<u32>) -> Result<Self, ModelError> {
        let deg = xdot.max_degree().unwrap_or(0).max(ydot.max_degree().unwrap_or(0)).max(1);
        let xdot = xdot.with_order(deg);
        let ydot = ydot.with_order(deg);
        check_normal_form(&xdot, &ydot)?;
        Ok(PlanarSystem {
            name: None,
            xdot,
            ydot,
            order: order.unwrap_or(MIN_DEFAULT_ORDER),
            order_explicit: order.is_some(),
            params: BTreeMap::new(),
        })
    }

    /// `x' = y + A`, `y' = B` from integer-indexed rational terms.
    pub fn from_terms(
        xdot: &[(u32, u32, BigRational)],
        ydot: &[(u32, u32, BigRational)],
        order: Option<u32>,
    ) -> Result<Self, ModelError> {
        let big = 1024;
        Self::new(
            TruncSeries2::from_terms(xdot.iter().cloned(), big),
            TruncSeries2::from_terms(ydot.iter().cloned(), big),
            order,
        )
    }

    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        let v: Value = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self, ModelError> {
        let obj = v.as_object().ok_or_else(|| ModelError::Schema("top level must be an object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "xdot" | "ydot" | "trunc_order" | "params" | "name" | "description") {
                return Err(ModelError::Schema(format!("unknown field `{key}`")));
            }
        }
        let mut params = BTreeMap::new();
        if let Some(p) = obj.get("params") {
            let p = p.as_object().ok_or_else(|| ModelError::Schema("`params` must be an object".into()))?;
            for (name, val) in p {
                if !is_identifier(name) {
                    return Err(ModelError::Schema(format!("invalid parameter name `{name}`")));
                }
                let q = json_rational(val).ok_or_else(|| ModelError::BadCoefficient(val.to_string()))?;
                params.insert(name.clone(), q);
            }
        }
        let order = match obj.get("trunc_order") {
            None | Some(Value::Null) => None,
            Some(k) => {
                let k = k.as_u64().ok_or_else(|| ModelError::Schema("`trunc_order` must be a positive integer".into()))?;
                if k == 0 || k > 512 {
                    return Err(ModelError::Schema(format!("`trunc_order` {k} out of range 1..=512")));
                }
                Some(k as u32)
            }
        };
        let xdot = parse_terms(obj.get("xdot"), "xdot", &params)?;
        let ydot = parse_terms(obj.get("ydot"), "ydot", &params)?;
        let mut sys = Self::from_terms(&xdot, &ydot, order)?;
        sys.params = params;
        sys.name = obj.get("name").and_then(|n| n.as_str()).map(str::to_string);
        Ok(sys)
    }

    pub fn to_json(&self) -> Value {
        let terms = |s: &TruncSeries2| -> Value {
            Value::Array(s.terms().map(|(i, j, c)| json!([i, j, format_rational(c)])).collect())
        };
        let mut m = Map::new();
        if let Some(n) = &self.name {
            m.insert("name".into(), json!(n));
        }
        m.insert("xdot".into(), terms(&self.xdot));
        m.insert("ydot".into(), terms(&self.ydot));
        m.insert("trunc_order".into(), json!(self.order));
        if !self.params.is_empty() {
            let p: Map<String, Value> =
                self.params.iter().map(|(k, v)| (k.clone(), json!(format_rational(v)))).collect();
            m.insert("params".into(), Value::Object(p));
        }
        Value::Object(m)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn params(&self) -> &BTreeMap<String, BigRational> {
        &self.params
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn order_is_explicit(&self) -> bool {
        self.order_explicit
    }

    pub fn with_order(&self, order: u32) -> Self {
        let mut s = self.clone();
        s.order = order;
        s.order_explicit = true;
        s
    }

    /// Exact `x'` polynomial.
    pub fn xdot_poly(&self) -> &TruncSeries2 {
        &self.xdot
    }

    /// Exact `y'` polynomial.
    pub fn ydot_poly(&self) -> &TruncSeries2 {
        &self.ydot
    }

    /// `x' = y + A` truncated at the working order.
    pub fn xdot(&self) -> TruncSeries2 {
        self.xdot.with_order(self.order)
    }

    /// `y' = B` truncated at the working order.
    pub fn ydot(&self) -> TruncSeries2 {
        self.ydot.with_order(self.order)
    }

    pub fn a_part(&self) -> TruncSeries2 {
        let mut a = self.xdot();
        a.add_term(0, 1, -BigRational::one());
        a
    }

    pub fn b_part(&self) -> TruncSeries2 {
        self.ydot()
    }

    /// Total degree of `B`.
    pub fn degree_b(&self) -> u32 {
        self.ydot.max_degree().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.xdot.max_degree().unwrap_or(0).max(self.degree_b())
    }

    /// Time-reversed field, which is no longer in normal form; used only by the flow engines.
    pub fn reversed_polys(&self) -> (TruncSeries2, TruncSeries2) {
        (-&self.xdot, -&self.ydot)
    }

    /// Characteristic curve and the series `F`, `G` at the working order.
    pub fn char_data(&self) -> Result<CharData, ModelError> {
        let k = self.order;
        let xdot = self.xdot();
        let f = solve_implicit(&xdot)?;
        let big_f = substitute_y(&self.ydot(), &f)?;
        let a = self.a_part();
        let div = &a.partial_x() + &self.ydot().partial_y();
        let big_g = substitute_y(&div, &f)?;
        Ok(CharData::from_series(k, f, big_f, big_g))
    }

    /// Order used when the caller did not fix one: at least `max(2m+2, 2n+4, 12)`,
    /// raised while `F` vanishes to the representable order.
    pub fn resolve_order(&self) -> Result<PlanarSystem, ModelError> {
        if self.order_explicit {
            return Ok(self.clone());
        }
        let mut k = self.order.max(MIN_DEFAULT_ORDER);
        loop {
            let sys = self.with_order(k);
            let cd = sys.char_data()?;
            let mut need = MIN_DEFAULT_ORDER;
            match cd.m {
                Some(m) => need = need.max(2 * m + 2),
                None => need = need.max(2 * k),
            }
            if let Some(n) = cd.n {
                need = need.max(2 * n + 4);
            }
            let need = need.min(MAX_AUTO_ORDER);
            if need <= k {
                let mut out = sys;
                out.order_explicit = false;
                return Ok(out);
            }
            k = need;
        }
    }

    /// Change of variables `u = x`, `v = y - f(x)` moving the characteristic curve to `v = 0`.
    ///
    /// The result is again in normal form, exact through the working order.
    pub fn flatten(&self) -> Result<PlanarSystem, ModelError> {
        let k = self.order;
        let f = solve_implicit(&self.xdot())?;
        let fpoly = TruncSeries2::from_terms(f.terms().map(|(p, c)| (p as u32, 0, c.clone())), k);
        let fprime = fpoly.partial_x().with_order(k);
        let u = TruncSeries2::x(k);
        let shifted = &TruncSeries2::y(k) + &fpoly;
        let xs = self.xdot().compose(&u, &shifted);
        let ys = self.ydot().compose(&u, &shifted);
        let vdot = &ys - &(&fprime * &xs);
        let mut sys = PlanarSystem::new(xs, vdot, Some(k))?;
        sys.name = self.name.as_ref().map(|n| format!("{n} (flattened)"));
        sys.params = self.params.clone();
        Ok(sys)
    }

    /// `phi_k` and `psi_k` along the characteristic curve, computed from partial
    /// derivatives rather than by composition.
    pub fn flatten_coefficients(&self, kmax: u32) -> Result<(Vec<PuiseuxSeries1>, Vec<PuiseuxSeries1>), ModelError> {
        let f = solve_implicit(&self.xdot())?;
        let fprime = f.derivative();
        let mut dx = self.xdot();
        let mut dy = self.ydot();
        let mut fact = BigRational::one();
        let mut phis = Vec::new();
        let mut psis = Vec::new();
        for k in 0..=kmax {
            if k > 0 {
                dx = dx.partial_y();
                dy = dy.partial_y();
                fact *= BigRational::from_integer(k.into());
            }
            let inv = BigRational::one() / &fact;
            let xk = substitute_y(&dx, &f)?.scale(&inv);
            let yk = substitute_y(&dy, &f)?.scale(&inv);
            psis.push(yk.sub(&fprime.mul(&xk)));
            phis.push(xk);
        }
        Ok((phis, psis))
    }
}

impl fmt::Display for PlanarSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x' = {}, y' = {}", self.xdot(), self.ydot())
    }
}

fn check_normal_form(xdot: &TruncSeries2, ydot: &TruncSeries2) -> Result<(), ModelError> {
    let show = |name: &str, i: u32, j: u32, c: &BigRational| {
        let mono = match (i, j) {
            (0, 0) => "1".to_string(),
            (1, 0) => "x".to_string(),
            _ => "y".to_string(),
        };
        format!("{name} contains {}*{mono}", format_rational(c))
    };
    for (i, j) in [(0, 0), (1, 0)] {
        if let Some(c) = xdot.get(i, j) {
            return Err(ModelError::NotNormalForm(show("xdot", i, j, c)));
        }
    }
    match xdot.get(0, 1) {
        Some(c) if c.is_one() => {}
        Some(c) => {
            return Err(ModelError::NotNormalForm(format!(
                "xdot linear part is {}*y, expected exactly y",
                format_rational(c)
            )))
        }
        None => return Err(ModelError::NotNormalForm("xdot has no linear term y".into())),
    }
    for (i, j) in [(0, 0), (1, 0), (0, 1)] {
        if let Some(c) = ydot.get(i, j) {
            return Err(ModelError::NotNormalForm(show("ydot", i, j, c)));
        }
    }
    Ok(())
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn json_rational(v: &Value) -> Option<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        _ => None,
    }
}

/// Evaluates `c1*c2*...` where each factor is a rational, a parameter name, or either
/// preceded by a sign.
fn parse_coefficient(v: &Value, params: &BTreeMap<String, BigRational>) -> Result<BigRational, ModelError> {
    if let Value::Number(_) = v {
        return json_rational(v).ok_or_else(|| ModelError::BadCoefficient(v.to_string()));
    }
    let text = v.as_str().ok_or_else(|| ModelError::BadCoefficient(v.to_string()))?;
    let bad = || ModelError::BadCoefficient(text.to_string());
    let mut s = text.trim();
    let mut sign = BigRational::one();
    while let Some(rest) = s.strip_prefix('-').or_else(|| s.strip_prefix('+')) {
        if s.starts_with('-') {
            sign = -sign;
        }
        s = rest.trim_start();
    }
    if s.is_empty() {
        return Err(bad());
    }
    let mut value = sign;
    let factors: Vec<&str> = s.split('*').map(str::trim).collect();
    let mut i = 0;
    while i < factors.len() {
        let fac = factors[i];
        if fac.is_empty() {
            return Err(bad());
        }
        let (neg, body) = match fac.strip_prefix('-') {
            Some(b) => (true, b.trim()),
            None => (false, fac),
        };
        let q = if is_identifier(body) {
            params.get(body).cloned().ok_or_else(|| ModelError::UnknownParameter(body.to_string()))?
        } else {
            parse_rational(body).ok_or_else(bad)?
        };
        value *= if neg { -q } else { q };
        i += 1;
    }
    Ok(value)
}

fn parse_terms(
    v: Option<&Value>,
    field: &str,
    params: &BTreeMap<String, BigRational>,
) -> Result<Vec<(u32, u32, BigRational)>, ModelError> {
    let arr = v
        .ok_or_else(|| ModelError::Schema(format!("missing field `{field}`")))?
        .as_array()
        .ok_or_else(|| ModelError::Schema(format!("`{field}` must be an array of [i, j, coeff]")))?;
    let mut out = Vec::new();
    for (k, t) in arr.iter().enumerate() {
        let t = t
            .as_array()
            .filter(|t| t.len() == 3)
            .ok_or_else(|| ModelError::Schema(format!("`{field}[{k}]` must be [i, j, coeff]")))?;
        let exp = |e: &Value| -> Result<u32, ModelError> {
            e.as_u64()
                .filter(|&e| e <= 256)
                .map(|e| e as u32)
                .ok_or_else(|| ModelError::Schema(format!("`{field}[{k}]` exponent must be an integer in 0..=256")))
        };
        let (i, j) = (exp(&t[0])?, exp(&t[1])?);
        let c = parse_coefficient(&t[2], params)?;
        out.push((i, j, c));
    }
    Ok(out)
}

/// Characteristic data: the curve `y = f(x)`, `F = B(x, f)`, `G = (A_x + B_y)(x, f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharData {
    pub order: u32,
    pub f: PuiseuxSeries1,
    pub big_f: PuiseuxSeries1,
    pub big_g: PuiseuxSeries1,
    /// Leading exponent of `F`; `None` when `F` vanishes to the representable order.
    pub m: Option<u32>,
    pub a: Option<BigRational>,
    pub n: Option<u32>,
    pub b: Option<BigRational>,
}

impl CharData {
    pub fn from_series(order: u32, f: PuiseuxSeries1, big_f: PuiseuxSeries1, big_g: PuiseuxSeries1) -> Self {
        let lead = |s: &PuiseuxSeries1| s.lowest().map(|(p, c)| (p as u32, c.clone()));
        let (m, a) = lead(&big_f).unzip();
        let (n, b) = lead(&big_g).unzip();
        CharData { order, f, big_f, big_g, m, a, n, b }
    }

    /// Direct construction from leading data, for classification without a system.
    pub fn from_leading(m: Option<(u32, BigRational)>, n: Option<(u32, BigRational)>) -> Self {
        let series = |d: &Option<(u32, BigRational)>| match d {
            Some((e, c)) => PuiseuxSeries1::integral([(*e as i64, c.clone())], *e as i64 + 1),
            None => PuiseuxSeries1::integral(std::iter::empty(), i64::from(u16::MAX)),
        };
        let big_f = series(&m);
        let big_g = series(&n);
        let (m, a) = m.unzip();
        let (n, b) = n.unzip();
        CharData {
            order: 0,
            f: PuiseuxSeries1::integral(std::iter::empty(), i64::from(u16::MAX)),
            big_f,
            big_g,
            m,
            a,
            n,
            b,
        }
    }

    pub fn f_is_zero(&self) -> bool {
        self.m.is_none()
    }

    pub fn g_is_zero(&self) -> bool {
        self.n.is_none()
    }

    /// `b^2 + 4a(n+1)` when both leading terms are known.
    pub fn discriminant(&self) -> Option<BigRational> {
        match (&self.a, &self.b, self.n) {
            (Some(a), Some(b), Some(n)) => Some(b * b + a * BigRational::from_integer((4 * (n as i64 + 1)).into())),
            _ => None,
        }
    }

    /// JSON summary with exact coefficients as strings.
    pub fn to_json(&self) -> Value {
        let series = |s: &PuiseuxSeries1| {
            json!({
                "terms": s.terms().map(|(p, c)| json!([p, format_rational(c)])).collect::<Vec<_>>(),
                "valid_below_exponent": s.prec_num(),
                "identically_zero_to_order": s.is_zero(),
            })
        };
        json!({
            "trunc_order": self.order,
            "f": series(&self.f),
            "F": series(&self.big_f),
            "G": series(&self.big_g),
            "m": self.m,
            "a": self.a.as_ref().map(format_rational),
            "n": self.n,
            "b": self.b.as_ref().map(format_rational),
            "discriminant": self.discriminant().as_ref().map(format_rational),
        })
    }
}

/// Sign of a rational as -1, 0, 1.
pub fn sign(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff::{int, rat};

    const EX1: &str = r#"{"xdot": [[0,1,"1"]], "ydot": [[5,0,"-1"],[2,1,"-4"]]}"#;
    const EX2: &str = r#"{"xdot": [[0,1,"1"],[2,0,"1"],[1,2,"1"]], "ydot": [[3,0,"-2"],[1,1,"-2"],[0,3,"2"]]}"#;

    #[test]
    fn parses_example_one() {
        let s = PlanarSystem::from_json_str(EX1).unwrap();
        assert_eq!(s.ydot_poly().coeff(5, 0), int(-1));
        assert_eq!(s.ydot_poly().coeff(2, 1), int(-4));
        let cd = s.char_data().unwrap();
        assert!(cd.f.is_zero());
        assert_eq!((cd.m, cd.a.clone()), (Some(5), Some(int(-1))));
        assert_eq!((cd.n, cd.b.clone()), (Some(2), Some(int(-4))));
    }

    #[test]
    fn rejects_wrong_linear_part() {
        let err = PlanarSystem::from_json_str(r#"{"xdot": [[1,0,"1"]], "ydot": []}"#).unwrap_err();
        assert!(err.to_string().contains("1*x"), "{err}");
        let err = PlanarSystem::from_json_str(r#"{"xdot": [[0,1,"1"]], "ydot": [[0,1,"3"]]}"#).unwrap_err();
        assert!(err.to_string().contains("ydot contains 3*y"), "{err}");
        let err = PlanarSystem::from_json_str(r#"{"xdot": [[0,1,"2"]], "ydot": []}"#).unwrap_err();
        assert!(matches!(err, ModelError::NotNormalForm(_)));
    }

    #[test]
    fn zero_b_is_valid() {
        let s = PlanarSystem::from_json_str(r#"{"xdot": [[0,1,"1"]], "ydot": []}"#).unwrap();
        let cd = s.char_data().unwrap();
        assert!(cd.f_is_zero() && cd.g_is_zero());
    }

    #[test]
    fn parameters_and_products() {
        let text = r#"{"xdot": [[0,1,"1"]], "ydot": [[2,0,"a"],[1,1,"-1/2*b"],[3,0,"-b"]],
                       "params": {"a": "3/4", "b": -2}}"#;
        let s = PlanarSystem::from_json_str(text).unwrap();
        assert_eq!(s.ydot_poly().coeff(2, 0), rat(3, 4));
        assert_eq!(s.ydot_poly().coeff(1, 1), int(1));
        assert_eq!(s.ydot_poly().coeff(3, 0), int(2));
        let err = PlanarSystem::from_json_str(r#"{"xdot": [[0,1,"1"]], "ydot": [[2,0,"c"]]}"#).unwrap_err();
        assert!(matches!(err, ModelError::UnknownParameter(_)));
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(PlanarSystem::from_json_str("[1]"), Err(ModelError::Schema(_))));
        assert!(matches!(PlanarSystem::from_json_str(r#"{"xdot": []}"#), Err(ModelError::Schema(_))));
        assert!(matches!(PlanarSystem::from_json_str("{"), Err(ModelError::Json(_))));
        assert!(matches!(
            PlanarSystem::from_json_str(r#"{"xdot": [[0,1,"1"]], "ydot": [[2,0,"x/"]]}"#),
            Err(ModelError::BadCoefficient(_))
        ));
    }

    #[test]
    fn example_two_characteristic_data() {
        let s = PlanarSystem::from_json_str(EX2).unwrap().with_order(15);
        let cd = s.char_data().unwrap();
        for (p, c) in [(2, -1), (5, -1), (8, -2), (11, -5)] {
            assert_eq!(cd.f.coeff(p), int(c));
        }
        assert_eq!((cd.m, cd.a.clone()), (Some(9), Some(int(-2))));
        assert_eq!((cd.n, cd.b.clone()), (Some(4), Some(int(7))));
        assert_eq!(cd.big_g.coeff(7), int(14));
        assert_eq!(cd.discriminant(), Some(int(9)));
    }

    #[test]
    fn flatten_identity_when_curve_is_axis() {
        let s = PlanarSystem::from_json_str(EX1).unwrap();
        let fl = s.flatten().unwrap();
        assert_eq!(fl.xdot(), s.xdot());
        assert_eq!(fl.ydot(), s.ydot());
    }

    #[test]
    fn flatten_moves_curve_to_axis() {
        let s = PlanarSystem::from_json_str(EX2).unwrap().with_order(14);
        let cd = s.char_data().unwrap();
        let fl = s.flatten().unwrap();
        let cdf = fl.char_data().unwrap();
        assert!(cdf.f.is_zero());
        assert_eq!((cdf.m, cdf.a), (cd.m, cd.a));
        // psi_0 of the flattened system is F of the original.
        let psi0: Vec<_> = fl.ydot().terms().filter(|t| t.1 == 0).map(|(i, _, c)| (i as i64, c.clone())).collect();
        for (p, c) in cd.big_f.terms() {
            if p <= 14 {
                assert!(psi0.contains(&(p, c.clone())), "x^{p}");
            }
        }
    }

    #[test]
    fn dual_route_matches_composition() {
        let s = PlanarSystem::from_json_str(EX2).unwrap().with_order(12);
        let fl = s.flatten().unwrap();
        let (phis, psis) = s.flatten_coefficients(3).unwrap();
        let a_star = fl.xdot();
        let b_star = fl.ydot();
        for k in 0..=3u32 {
            for (p, c) in phis[k as usize].terms() {
                if p as u32 + k <= 10 {
                    assert_eq!(&a_star.coeff(p as u32, k), c, "phi_{k} at u^{p}");
                }
            }
            for (p, c) in psis[k as usize].terms() {
                if p as u32 + k <= 10 {
                    assert_eq!(&b_star.coeff(p as u32, k), c, "psi_{k} at u^{p}");
                }
            }
        }
        assert!(phis[0].is_zero());
    }

    #[test]
    fn json_round_trip() {
        let s = PlanarSystem::from_json_str(EX2).unwrap();
        let back = PlanarSystem::from_json(&s.to_json()).unwrap();
        assert_eq!(back.xdot_poly(), s.xdot_poly());
        assert_eq!(back.ydot_poly(), s.ydot_poly());
    }

    #[test]
    fn auto_order_resolves_example_two() {
        let s = PlanarSystem::from_json_str(EX2).unwrap().resolve_order().unwrap();
        assert_eq!(s.order(), 20);
    }
}
