//! Exact truncated series: bivariate, time-polynomial and Puiseux.

pub mod bivariate;
pub mod coeff;
pub mod implicit;
pub mod puiseux;
pub mod surd;
pub mod tpoly;

pub use bivariate::{Series2, TPolySeries2, TruncSeries2};
pub use coeff::{parse_rational, Field, Ring};
pub use implicit::solve_implicit;
pub use puiseux::{substitute_y, Puiseux, PuiseuxSeries1};
pub use surd::QuadSurd;
pub use tpoly::TPoly;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("substituted series must vanish at the origin (lowest exponent {exponent})")]
    NonPositiveExponent { exponent: String },
    #[error("implicit equation is not solvable: {0}")]
    NotSolvable(String),
}
