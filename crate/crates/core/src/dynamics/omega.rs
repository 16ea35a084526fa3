//! Limit behaviour of trajectories.
//!
//! Starting points on `x_m = 0` or at `e_m` land on `e_m` after one step.
//! Otherwise `x_m → 1/2`, and then
//!
//! * `α ∈ (0, 1)`, `π ≠ Id`: the orbit converges to a point of `X`;
//! * `α = 0`, `π ≠ Id`: the orbit approaches a cycle whose period divides
//!   `s = lcm` of the cycle lengths of `π`;
//! * `α = 1` or `π = Id`: the orbit converges.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{check_dim, Stepper};
use crate::error::{QsoError, Result};
use crate::operator::{x_membership, OperatorSpec, XMembership};
use crate::permutation::composite_order;
use crate::simplex::{l1, SimplexPoint};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 100_000;
pub const DEFAULT_BURN_IN: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaCase {
    BoundaryToVertex,
    #[serde(rename = "interior_to_X")]
    InteriorToX,
    PeriodicOrbit,
    IdentityInterior,
}

impl OmegaCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::BoundaryToVertex => "boundary_to_vertex",
            Self::InteriorToX => "interior_to_X",
            Self::PeriodicOrbit => "periodic_orbit",
            Self::IdentityInterior => "identity_interior",
        }
    }
}

/// Shares of `x_1 + ... + x_{m-1}` carried by each block (cycle support or
/// fixed coordinate of `π`). Every block sum is multiplied by the same
/// factor `2 x_m` per step, so these shares are constant along an orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantities {
    pub blocks: Vec<Vec<usize>>,
    pub initial: Vec<f64>,
    pub limit: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaLimitReport {
    pub case: OmegaCase,
    pub limit_points: Vec<SimplexPoint>,
    pub period: usize,
    pub residual: f64,
    pub iterations_used: usize,
    /// Distance of the limit from `X` (case `interior_to_X` only).
    pub membership: Option<XMembership>,
    pub conserved: Option<ConservedQuantities>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub period: usize,
    pub points: Vec<SimplexPoint>,
}

/// Blocks of `π` (cycle supports, then fixed points) and each block's share
/// of `Σ_{k<m} x_k`; `None` when that sum vanishes.
pub fn block_fractions(spec: &OperatorSpec, x: &[f64]) -> (Vec<Vec<usize>>, Option<Vec<f64>>) {
    let d = spec.decomposition();
    let blocks: Vec<Vec<usize>> = d
        .cycles
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        })
        .chain(d.fixed_points.iter().map(|k| vec![k]))
        .collect();
    let total: f64 = x[..spec.m() - 1].iter().sum();
    if total <= 0.0 {
        return (blocks, None);
    }
    let shares = blocks
        .iter()
        .map(|b| b.iter().map(|&k| x[k - 1]).sum::<f64>() / total)
        .collect();
    (blocks, Some(shares))
}

fn conserved(spec: &OperatorSpec, x0: &[f64], limit: &[f64]) -> Option<ConservedQuantities> {
    let (blocks, initial) = block_fractions(spec, x0);
    let (_, lim) = block_fractions(spec, limit);
    let (initial, limit) = (initial?, lim?);
    let max_deviation = initial
        .iter()
        .zip(&limit)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Some(ConservedQuantities {
        blocks,
        initial,
        limit,
        max_deviation,
    })
}

fn divisors(s: usize) -> impl Iterator<Item = usize> {
    (1..=s).filter(move |&p| s.is_multiple_of(p))
}

/// Classifies the limit set of the orbit of `x0`.
///
/// Converging cases stop once `‖x^{(n+1)} - x^{(n)}‖₁ <= tol`; for
/// `interior_to_X` the distance to `X` (see [`XMembership`]) must also be
/// within `tol`. The `α = 0` case stops once `‖x^{(n+s)} - x^{(n)}‖₁ <= tol`.
pub fn omega_limit(
    spec: &OperatorSpec,
    x0: &SimplexPoint,
    max_iters: usize,
    tol: f64,
) -> Result<OmegaLimitReport> {
    check_dim(spec, x0)?;
    if max_iters == 0 {
        return Err(QsoError::InvalidArgument("max_iters must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(QsoError::InvalidArgument("tol must be positive".into()));
    }
    let m = spec.m();
    let xm = x0.last();
    if xm == 0.0 || xm == 1.0 {
        let mut st = Stepper::new(spec, x0)?;
        st.step();
        let vertex = SimplexPoint::vertex(m, m)?;
        return Ok(OmegaLimitReport {
            case: OmegaCase::BoundaryToVertex,
            residual: l1(st.current(), vertex.coords()),
            limit_points: vec![vertex],
            period: 1,
            iterations_used: usize::from(xm == 0.0),
            membership: None,
            conserved: None,
        });
    }

    let non_identity = !spec.pi().is_identity();
    if spec.alpha() == 0.0 && non_identity {
        return periodic_limit(spec, x0, max_iters, tol);
    }

    let to_x = non_identity && spec.alpha() < 1.0;
    let mut st = Stepper::new(spec, x0)?;
    let mut best = f64::INFINITY;
    for n in 1..=max_iters {
        let diff = st.step();
        let metric = if to_x {
            diff.max(x_membership(spec, &st.point()).worst())
        } else {
            diff
        };
        best = best.min(metric);
        if metric <= tol {
            let limit = st.point();
            return Ok(OmegaLimitReport {
                case: if to_x {
                    OmegaCase::InteriorToX
                } else {
                    OmegaCase::IdentityInterior
                },
                membership: to_x.then(|| x_membership(spec, &limit)),
                conserved: conserved(spec, x0.coords(), limit.coords()),
                limit_points: vec![limit],
                period: 1,
                residual: metric,
                iterations_used: n,
            });
        }
    }
    Err(QsoError::NoConvergence {
        iterations: max_iters,
        residual: best,
    })
}

fn periodic_limit(
    spec: &OperatorSpec,
    x0: &SimplexPoint,
    max_iters: usize,
    tol: f64,
) -> Result<OmegaLimitReport> {
    let s = composite_order(spec.decomposition());
    let mut st = Stepper::new(spec, x0)?;
    let mut window: VecDeque<Vec<f64>> = VecDeque::with_capacity(s + 1);
    window.push_back(st.current().to_vec());
    let mut best = f64::INFINITY;
    let mut converged = None;
    for n in 1..=max_iters {
        st.step();
        window.push_back(st.current().to_vec());
        if window.len() > s + 1 {
            window.pop_front();
        }
        if n >= s {
            let lag = l1(&window[0], &window[s]);
            best = best.min(lag);
            if lag <= tol {
                converged = Some((n, lag));
                break;
            }
        }
    }
    let (n, residual) = converged.ok_or(QsoError::NoConvergence {
        iterations: max_iters,
        residual: best,
    })?;

    let mut orbit = vec![st.current().to_vec()];
    for _ in 0..s {
        st.step();
        orbit.push(st.current().to_vec());
    }
    let period = divisors(s)
        .find(|&p| l1(&orbit[0], &orbit[p]) <= tol)
        .unwrap_or(s);
    orbit.truncate(period);
    Ok(OmegaLimitReport {
        case: OmegaCase::PeriodicOrbit,
        conserved: conserved(spec, x0.coords(), &orbit[0]),
        limit_points: orbit.into_iter().map(SimplexPoint::from_raw).collect(),
        period,
        residual,
        iterations_used: n,
        membership: None,
    })
}

/// After `burn_in` steps, the least `p <= max_period` with
/// `‖x^{(n+p)} - x^{(n)}‖₁ <= tol`, and the `p` orbit points.
pub fn detect_periodic_orbit(
    spec: &OperatorSpec,
    x0: &SimplexPoint,
    max_period: usize,
    burn_in: usize,
    tol: f64,
) -> Result<Option<PeriodicOrbit>> {
    if max_period == 0 {
        return Err(QsoError::InvalidArgument("max_period must be >= 1".into()));
    }
    let mut st = Stepper::new(spec, x0)?;
    for _ in 0..burn_in {
        st.step();
    }
    let mut pts = vec![st.point()];
    for p in 1..=max_period {
        st.step();
        if l1(st.current(), pts[0].coords()) <= tol {
            return Ok(Some(PeriodicOrbit { period: p, points: pts }));
        }
        pts.push(st.point());
    }
    Ok(None)
}
