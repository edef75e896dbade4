//! Classification of nilpotent singular points from their characteristic data.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::system_model::CharData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    NonIsolatedAxis,
    Saddle,
    CenterOrFocus,
    Cusp,
    SaddleNode,
    EllipticHyperbolic,
    Node,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Attracting,
    Repelling,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityClass {
    pub kind: Kind,
    pub stability: Stability,
    /// `None` stands for infinite multiplicity.
    pub multiplicity: Option<u32>,
    pub case_label: &'static str,
}

impl fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} (case {}", self.kind, self.case_label)?;
        if self.stability != Stability::NotApplicable {
            write!(f, ", {:?}", self.stability)?;
        }
        match self.multiplicity {
            Some(m) => write!(f, ", multiplicity {m})"),
            None => write!(f, ", multiplicity infinite)"),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ClassifierError {
    #[error("node cyclicity bound needs an odd multiplicity m >= 3, got {0}")]
    EvenOrSmall(u32),
    #[error("cusp cyclicity bound needs n >= 1")]
    ZeroOrder,
}

/// Decision tree on `F = a x^m + ...`, `G = b x^n + ...`.
pub fn classify(cd: &CharData) -> SingularityClass {
    let mk = |kind, stability, case_label| SingularityClass { kind, stability, multiplicity: cd.m, case_label };
    let na = Stability::NotApplicable;
    let (m, a) = match (cd.m, &cd.a) {
        (Some(m), Some(a)) => (m, a),
        _ => {
            let label = if cd.g_is_zero() { "1" } else { "2" };
            return mk(Kind::NonIsolatedAxis, na, label);
        }
    };
    let odd = m % 2 == 1;
    let (n, b) = match (cd.n, &cd.b) {
        (Some(n), Some(b)) => (n, b),
        _ => {
            return if !odd {
                mk(Kind::Cusp, na, "3.ii")
            } else if a.is_positive() {
                mk(Kind::Saddle, na, "3.i")
            } else {
                mk(Kind::CenterOrFocus, na, "3.i")
            };
        }
    };
    let threshold = 2 * n + 1;
    if !odd {
        return if m < threshold { mk(Kind::Cusp, na, "4.i1") } else { mk(Kind::SaddleNode, na, "4.i2") };
    }
    if a.is_positive() {
        return mk(Kind::Saddle, na, "4.ii");
    }
    let disc = b * b + a * BigRational::from_integer((4 * (n as i64 + 1)).into());
    let node_side = m > threshold || (m == threshold && !disc.is_negative());
    if !node_side {
        return mk(Kind::CenterOrFocus, na, "4.iii1");
    }
    if n % 2 == 1 {
        return mk(Kind::EllipticHyperbolic, na, "4.iii2");
    }
    let stability = if b.is_positive() {
        Stability::Repelling
    } else if b.is_zero() {
        na
    } else {
        Stability::Attracting
    };
    mk(Kind::Node, stability, "4.iii3")
}

/// At least `(m-1)/2` limit cycles bifurcate from an `m`-multiple node.
pub fn node_cyclicity_lower_bound(m: u32) -> Result<u32, ClassifierError> {
    if m.is_multiple_of(2) || m < 3 {
        return Err(ClassifierError::EvenOrSmall(m));
    }
    Ok((m - 1) / 2)
}

/// Largest `L` with `floor(3L/2) <= n`: the bound on limit cycles for a cusp of order `n`.
pub fn cusp_cyclicity_bound(n: u32) -> Result<u32, ClassifierError> {
    if n == 0 {
        return Err(ClassifierError::ZeroOrder);
    }
    let mut l = 0;
    while (3 * (l + 1)) / 2 <= n {
        l += 1;
    }
    Ok(l)
}

/// Leading-term discriminant as an exact rational, if defined.
pub fn discriminant(cd: &CharData) -> Option<BigRational> {
    cd.discriminant().filter(|_| !cd.f_is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff::int;

    fn cd(m: Option<(u32, i64)>, n: Option<(u32, i64)>) -> CharData {
        CharData::from_leading(m.map(|(e, c)| (e, int(c))), n.map(|(e, c)| (e, int(c))))
    }

    #[test]
    fn paper_examples() {
        let c = classify(&cd(Some((5, -1)), Some((2, -4))));
        assert_eq!((c.kind, c.stability, c.multiplicity, c.case_label), (Kind::Node, Stability::Attracting, Some(5), "4.iii3"));
        let c = classify(&cd(Some((2, 1)), None));
        assert_eq!((c.kind, c.multiplicity, c.case_label), (Kind::Cusp, Some(2), "3.ii"));
        let c = classify(&cd(Some((9, -2)), Some((4, 7))));
        assert_eq!((c.kind, c.stability, c.multiplicity), (Kind::Node, Stability::Repelling, Some(9)));
    }

    #[test]
    fn other_branches() {
        assert_eq!(classify(&cd(None, None)).case_label, "1");
        assert_eq!(classify(&cd(None, Some((1, 1)))).case_label, "2");
        assert_eq!(classify(&cd(Some((3, 1)), None)).kind, Kind::Saddle);
        assert_eq!(classify(&cd(Some((3, -1)), None)).kind, Kind::CenterOrFocus);
        assert_eq!(classify(&cd(Some((2, 1)), Some((1, 1)))).case_label, "4.i1");
        assert_eq!(classify(&cd(Some((4, 1)), Some((1, 1)))).case_label, "4.i2");
        assert_eq!(classify(&cd(Some((3, 2)), Some((1, 1)))).case_label, "4.ii");
        assert_eq!(classify(&cd(Some((3, -1)), Some((2, -1)))).case_label, "4.iii1");
        // m = 2n+1 with negative discriminant: 1 - 8 < 0.
        assert_eq!(classify(&cd(Some((3, -1)), Some((1, 1)))).case_label, "4.iii1");
        // m = 2n+1, n odd, discriminant 9 - 8 >= 0.
        assert_eq!(classify(&cd(Some((3, -1)), Some((1, 3)))).case_label, "4.iii2");
        assert_eq!(classify(&cd(Some((7, -1)), Some((1, 1)))).case_label, "4.iii2");
        // Boundary: discriminant exactly zero is on the node side.
        let c = classify(&cd(Some((5, -3)), Some((2, 6))));
        assert_eq!((c.kind, c.stability), (Kind::Node, Stability::Repelling));
    }

    #[test]
    fn cyclicity_bounds() {
        assert_eq!(node_cyclicity_lower_bound(5), Ok(2));
        assert_eq!(node_cyclicity_lower_bound(9), Ok(4));
        assert_eq!(node_cyclicity_lower_bound(3), Ok(1));
        assert!(node_cyclicity_lower_bound(4).is_err());
        assert_eq!(cusp_cyclicity_bound(3), Ok(2));
        assert_eq!(cusp_cyclicity_bound(1), Ok(1));
        assert_eq!(cusp_cyclicity_bound(6), Ok(4));
        assert!(cusp_cyclicity_bound(0).is_err());
    }
}
