use crate::series::{Field, TruncSeries2};
use crate::system_model::PlanarSystem;

use super::{State, VectorField};

/// Polynomial field with floating-point coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyField {
    xdot: Vec<(u32, u32, f64)>,
    ydot: Vec<(u32, u32, f64)>,
}

fn mono(i: u32, j: u32, p: &State) -> f64 {
    p[0].powi(i as i32) * p[1].powi(j as i32)
}

fn eval_terms(terms: &[(u32, u32, f64)], p: &State) -> f64 {
    terms.iter().map(|&(i, j, c)| c * mono(i, j, p)).sum()
}

/// `d/dx` (axis 0) or `d/dy` (axis 1) of a term list.
fn diff_terms(terms: &[(u32, u32, f64)], axis: usize) -> Vec<(u32, u32, f64)> {
    terms
        .iter()
        .filter_map(|&(i, j, c)| match axis {
            0 if i > 0 => Some((i - 1, j, c * i as f64)),
            1 if j > 0 => Some((i, j - 1, c * j as f64)),
            _ => None,
        })
        .collect()
}

impl PolyField {
    pub fn new(xdot: Vec<(u32, u32, f64)>, ydot: Vec<(u32, u32, f64)>) -> Self {
        PolyField { xdot, ydot }
    }

    pub fn from_series(xdot: &TruncSeries2, ydot: &TruncSeries2) -> Self {
        let conv = |s: &TruncSeries2| s.terms().map(|(i, j, c)| (i, j, Field::to_f64(c))).collect();
        PolyField { xdot: conv(xdot), ydot: conv(ydot) }
    }

    /// Uses the exact polynomials of the system, not their truncation.
    pub fn from_system(sys: &PlanarSystem) -> Self {
        Self::from_series(sys.xdot_poly(), sys.ydot_poly())
    }

    pub fn negated(&self) -> Self {
        let neg = |v: &[(u32, u32, f64)]| v.iter().map(|&(i, j, c)| (i, j, -c)).collect();
        PolyField { xdot: neg(&self.xdot), ydot: neg(&self.ydot) }
    }

    #[allow(clippy::type_complexity)]
    pub fn terms(&self) -> (&[(u32, u32, f64)], &[(u32, u32, f64)]) {
        (&self.xdot, &self.ydot)
    }

    #[allow(clippy::needless_range_loop)]
    pub fn jacobian(&self, p: State) -> [[f64; 2]; 2] {
        let mut j = [[0.0; 2]; 2];
        for (row, comp) in [&self.xdot, &self.ydot].into_iter().enumerate() {
            for axis in 0..2 {
                j[row][axis] = eval_terms(&diff_terms(comp, axis), &p);
            }
        }
        j
    }

    /// `h[i][j][k] = d^2 F_i / dx_j dx_k`.
    #[allow(clippy::needless_range_loop)]
    pub fn hessians(&self, p: State) -> [[[f64; 2]; 2]; 2] {
        let mut h = [[[0.0; 2]; 2]; 2];
        for (row, comp) in [&self.xdot, &self.ydot].into_iter().enumerate() {
            for a in 0..2 {
                let d = diff_terms(comp, a);
                for b in 0..2 {
                    h[row][a][b] = eval_terms(&diff_terms(&d, b), &p);
                }
            }
        }
        h
    }
}

impl VectorField for PolyField {
    fn eval(&self, p: State) -> State {
        [eval_terms(&self.xdot, &p), eval_terms(&self.ydot, &p)]
    }
}
