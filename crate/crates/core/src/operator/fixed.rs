//! Fixed points of `V_α` and their linear stability.
//!
//! Besides the vertex `e_m`, the fixed points form the polytope
//! `X = { x : x_m = 1/2, x constant on each cycle support of π }`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{apply, jacobian, OperatorSpec};
use crate::eigen::eigenvalues;
use crate::error::{QsoError, Result};
use crate::simplex::{dirichlet_weights, l1_distance, SimplexPoint};

/// Band around the unit circle treated as "on" it.
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;
/// Largest residual `‖V(x) - x‖₁` accepted by [`classify_fixed_point`].
pub const FIXED_POINT_TOL: f64 = 1e-9;

/// Symbolic description of `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XDescription {
    /// Cycle supports; coordinates within one block are equal on `X`.
    pub cycle_blocks: Vec<Vec<usize>>,
    /// Coordinates fixed by `π`, free apart from the sum constraint.
    pub free_coords: Vec<usize>,
    /// Value of `x_m` on `X`.
    pub last_coord: f64,
    /// Value of `x_1 + ... + x_{m-1}` on `X`.
    pub block_sum: f64,
    /// Dimension of `X` as a polytope (number of blocks minus one).
    pub dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSet {
    pub vertex: SimplexPoint,
    pub x_set: XDescription,
    pub representatives: Vec<SimplexPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Attracting,
    Repelling,
    Saddle,
    NonHyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub point: SimplexPoint,
    pub eigenvalues: Vec<Complex64>,
    pub classification: Stability,
    /// True when the eigenvalues came from the closed form at `e_m`.
    pub analytic: bool,
}

/// How far a point is from `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XMembership {
    /// `|x_m - 1/2|`.
    pub last_deviation: f64,
    /// Largest `max - min` of the coordinates over one cycle support.
    pub max_cycle_spread: f64,
}

impl XMembership {
    pub fn worst(&self) -> f64 {
        self.last_deviation.max(self.max_cycle_spread)
    }
}

pub fn x_membership(spec: &OperatorSpec, x: &SimplexPoint) -> XMembership {
    let max_cycle_spread = spec
        .decomposition()
        .cycles
        .iter()
        .map(|c| {
            let (lo, hi) = c.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &k| {
                let v = x.get(k);
                (lo.min(v), hi.max(v))
            });
            hi - lo
        })
        .fold(0.0, f64::max);
    XMembership {
        last_deviation: (x.last() - 0.5).abs(),
        max_cycle_spread,
    }
}

/// `‖V(x) - x‖₁`.
pub fn fixed_point_residual(spec: &OperatorSpec, x: &SimplexPoint) -> Result<f64> {
    l1_distance(&apply(spec, x)?, x)
}

/// `e_m`, the description of `X` and `n_representatives` seeded samples of
/// `X`, drawn uniformly over the polytope of block masses.
pub fn fixed_points(spec: &OperatorSpec, n_representatives: usize, seed: u64) -> FixedPointSet {
    let m = spec.m();
    let d = spec.decomposition();
    let x_set = XDescription {
        cycle_blocks: d.cycles.iter().map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        }).collect(),
        free_coords: d.fixed_points.as_slice().to_vec(),
        last_coord: 0.5,
        block_sum: 0.5,
        dimension: d.cycles.len() + d.fixed_points.len() - 1,
    };
    let blocks: Vec<Vec<usize>> = x_set
        .cycle_blocks
        .iter()
        .cloned()
        .chain(x_set.free_coords.iter().map(|&k| vec![k]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let representatives = (0..n_representatives)
        .map(|_| {
            let w = dirichlet_weights(blocks.len(), &mut rng);
            let mut coords = vec![0.0; m];
            for (block, wb) in blocks.iter().zip(w) {
                let v = 0.5 * wb / block.len() as f64;
                for &k in block {
                    coords[k - 1] = v;
                }
            }
            coords[m - 1] = 0.5;
            SimplexPoint::new(coords).expect("block masses sum to one half")
        })
        .collect();
    FixedPointSet {
        vertex: SimplexPoint::vertex(m, m).expect("m >= 2"),
        x_set,
        representatives,
    }
}

/// Closed-form Jacobian spectrum at `e_m`: `2` for `x_m`, `2` for each fixed
/// point of `π`, and `2(α + (1-α)ω)` for every `t`-th root of unity `ω` of a
/// cycle of length `t`.
pub fn analytic_vertex_eigenvalues(spec: &OperatorSpec) -> Vec<Complex64> {
    let a = spec.alpha();
    let d = spec.decomposition();
    let mut ev = vec![Complex64::new(2.0, 0.0)];
    for c in &d.cycles {
        let t = c.len();
        for j in 0..t {
            let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / t as f64);
            ev.push(2.0 * (a + (1.0 - a) * omega));
        }
    }
    ev.extend(d.fixed_points.iter().map(|_| Complex64::new(2.0, 0.0)));
    ev
}

/// Hyperbolicity classification by eigenvalue moduli.
pub fn classify_moduli(eigenvalues: &[Complex64], tol: f64) -> Stability {
    if eigenvalues.iter().any(|z| (z.norm() - 1.0).abs() <= tol) {
        Stability::NonHyperbolic
    } else if eigenvalues.iter().all(|z| z.norm() < 1.0) {
        Stability::Attracting
    } else if eigenvalues.iter().all(|z| z.norm() > 1.0) {
        Stability::Repelling
    } else {
        Stability::Saddle
    }
}

/// Eigenvalues of the ambient Jacobian at a fixed point and the resulting
/// classification.
pub fn classify_fixed_point(spec: &OperatorSpec, x_star: &SimplexPoint) -> Result<StabilityReport> {
    let residual = fixed_point_residual(spec, x_star)?;
    if !(residual <= FIXED_POINT_TOL) {
        return Err(QsoError::NotAFixedPoint { residual });
    }
    let at_vertex = x_star.last() == 1.0;
    let eigenvalues = if at_vertex {
        analytic_vertex_eigenvalues(spec)
    } else {
        eigenvalues(&jacobian(spec, x_star)?)?
    };
    Ok(StabilityReport {
        point: x_star.clone(),
        classification: classify_moduli(&eigenvalues, UNIT_CIRCLE_TOL),
        eigenvalues,
        analytic: at_vertex,
    })
}
