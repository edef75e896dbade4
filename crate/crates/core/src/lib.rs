//! Analysis of nilpotent singular points of planar polynomial vector fields.
//!
//! The crate computes the unit-time map of a truncated system, its characteristic
//! curve and map, a classification of the singular point, and numerical box
//! dimensions of orbits, checked against closed-form predictions.

pub mod series;
pub mod classifier;
pub mod system_model;
pub mod unit_time;
pub mod ode;
pub mod fractal;
pub mod cusp_infinity;
pub mod poincare;
pub mod atlas;
pub mod report;
