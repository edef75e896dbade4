//! Closed-form dimensions of orbits with power-law steps.

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use super::FractalError;
use crate::series::coeff::format_rational;

/// `1 - 1/max(alpha, beta)` for a planar orbit whose projections have step exponents
/// `alpha` and `beta`.
pub fn lemma2_dimension(alpha: f64, beta: f64) -> Result<f64, FractalError> {
    for e in [alpha, beta] {
        if e.is_nan() || e <= 1.0 {
            return Err(FractalError::ExponentTooSmall(e));
        }
    }
    Ok(1.0 - 1.0 / alpha.max(beta))
}

pub fn lemma2_exact(alpha: &BigRational, beta: &BigRational) -> Result<BigRational, FractalError> {
    let one = BigRational::one();
    for e in [alpha, beta] {
        if *e <= one {
            return Err(FractalError::ExponentTooSmall(crate::series::coeff::rational_to_f64(e)));
        }
    }
    Ok(&one - one.clone() / alpha.max(beta).clone())
}

/// Dimensions of an orbit along `y ~ x^gamma` near a singularity with `F ~ x^m`, `G ~ x^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem3Dims {
    pub dim_x: f64,
    pub dim_y: f64,
    pub dim: f64,
    /// `"m<=n+1"` or `"m>n+1"`.
    pub case: &'static str,
    /// Whether the joint dimension is attained by the x-projection.
    pub x_dominates: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<[String; 3]>,
}

/// `n = None` means `G` vanishes identically.
pub fn theorem3_dimensions(m: u32, n: Option<u32>, gamma: f64) -> Result<Theorem3Dims, FractalError> {
    let mf = m as f64;
    if !(gamma > 1.0 && gamma < mf) {
        return Err(FractalError::GammaOutOfRange { gamma: gamma.to_string(), m });
    }
    let dim_x = 1.0 - 1.0 / gamma;
    let (case, dim_y, x_dominates) = match n {
        Some(n) if m > n + 1 => {
            let nf = n as f64;
            ("m>n+1", nf / (nf + gamma), gamma * (gamma - 1.0) >= nf)
        }
        _ => ("m<=n+1", 1.0 - gamma / mf, gamma * gamma >= mf),
    };
    let dim = if x_dominates { dim_x } else { dim_y };
    Ok(Theorem3Dims { dim_x, dim_y, dim, case, x_dominates, exact: None })
}

/// Rational-gamma version; the branch tests are exact.
pub fn theorem3_exact(m: u32, n: Option<u32>, gamma: &BigRational) -> Result<Theorem3Dims, FractalError> {
    let one = BigRational::one();
    let mq = BigRational::from_integer(m.into());
    if *gamma <= one || *gamma >= mq {
        return Err(FractalError::GammaOutOfRange { gamma: format_rational(gamma), m });
    }
    let dim_x = &one - one.clone() / gamma.clone();
    let (case, dim_y, x_dominates) = match n {
        Some(n) if m > n + 1 => {
            let nq = BigRational::from_integer(n.into());
            let dy = nq.clone() / (&nq + gamma);
            ("m>n+1", dy, !(gamma * (gamma - &one) - &nq).is_negative())
        }
        _ => ("m<=n+1", &one - gamma / &mq, !(gamma * gamma - &mq).is_negative()),
    };
    let dim = if x_dominates { dim_x.clone() } else { dim_y.clone() };
    let f = crate::series::coeff::rational_to_f64;
    Ok(Theorem3Dims {
        dim_x: f(&dim_x),
        dim_y: f(&dim_y),
        dim: f(&dim),
        case,
        x_dominates,
        exact: Some([format_rational(&dim_x), format_rational(&dim_y), format_rational(&dim)]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::coeff::{int, rat};

    #[test]
    fn lemma2_cases() {
        assert_eq!(lemma2_exact(&int(3), &int(2)).unwrap(), rat(2, 3));
        assert_eq!(lemma2_exact(&int(2), &int(5)).unwrap(), rat(4, 5));
        assert!((lemma2_dimension(4.0, 4.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(lemma2_dimension(1.0, 3.0).is_err());
    }

    #[test]
    fn theorem3_examples() {
        let d = theorem3_exact(5, Some(2), &int(3)).unwrap();
        assert_eq!(d.exact.unwrap(), ["2/3".to_string(), "2/5".into(), "2/3".into()]);
        assert_eq!(d.case, "m>n+1");
        let d = theorem3_exact(4, None, &int(2)).unwrap();
        assert_eq!(d.exact.as_ref().unwrap()[2], "1/2");
        assert!(d.x_dominates);
        let d = theorem3_exact(9, Some(4), &int(5)).unwrap();
        assert_eq!(d.exact.unwrap(), ["4/5".to_string(), "4/9".into(), "4/5".into()]);
        assert!(theorem3_dimensions(5, Some(2), 5.0).is_err());
        assert!(theorem3_dimensions(5, Some(2), 1.0).is_err());
    }

    #[test]
    fn threshold_is_exact() {
        // gamma(gamma - 1) = n exactly at gamma = 2, n = 2: x-projection wins.
        let d = theorem3_exact(7, Some(2), &int(2)).unwrap();
        assert!(d.x_dominates);
        let d = theorem3_exact(7, Some(2), &rat(199, 100)).unwrap();
        assert!(!d.x_dominates);
        let f = theorem3_dimensions(7, Some(2), 1.99).unwrap();
        assert!((f.dim - 2.0 / 3.99).abs() < 1e-12);
    }
}
