//! Monotone functions along orbits.
//!
//! * `phi_cycle(i)`: the sum of the coordinates on the support of cycle `i`;
//!   one step multiplies it by exactly `2 x_m`.
//! * `phi_coord(k)`: the coordinate `x_k` for `k` fixed by `π`.
//! * `psi_cycle(i)`: the minimum coordinate on the support of cycle `i`.
//!
//! Since `x_m >= 1/2` from step one on, all three are non-decreasing there.

use serde::{Deserialize, Serialize};

use super::Stepper;
use crate::error::{QsoError, Result};
use crate::operator::OperatorSpec;
use crate::simplex::SimplexPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum LyapunovKind {
    PhiCycle(usize),
    PhiCoord(usize),
    PsiCycle(usize),
}

impl LyapunovKind {
    pub fn validate(&self, spec: &OperatorSpec) -> Result<()> {
        let d = spec.decomposition();
        match *self {
            Self::PhiCycle(i) | Self::PsiCycle(i) if i == 0 || i > d.num_cycles() => {
                Err(QsoError::InvalidKind(format!(
                    "{self:?}: π has {} cycles",
                    d.num_cycles()
                )))
            }
            Self::PhiCoord(k) if !d.fixed_points.contains(k) => Err(QsoError::InvalidKind(format!(
                "{self:?}: {k} is not a fixed point of π"
            ))),
            _ => Ok(()),
        }
    }

    /// Value at `x` (coordinates, 0-based slice). Assumes a valid kind.
    pub fn evaluate(&self, spec: &OperatorSpec, x: &[f64]) -> f64 {
        let d = spec.decomposition();
        match *self {
            Self::PhiCycle(i) => d.cycles[i - 1].iter().map(|&k| x[k - 1]).sum(),
            Self::PhiCoord(k) => x[k - 1],
            Self::PsiCycle(i) => d.cycles[i - 1]
                .iter()
                .map(|&k| x[k - 1])
                .fold(f64::INFINITY, f64::min),
        }
    }
}

impl std::fmt::Display for LyapunovKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PhiCycle(i) => write!(f, "phi_cycle({i})"),
            Self::PhiCoord(k) => write!(f, "phi_coord({k})"),
            Self::PsiCycle(i) => write!(f, "psi_cycle({i})"),
        }
    }
}

/// Every kind that applies to `spec`.
pub fn lyapunov_kinds(spec: &OperatorSpec) -> Vec<LyapunovKind> {
    let d = spec.decomposition();
    let q = d.num_cycles();
    (1..=q)
        .map(LyapunovKind::PhiCycle)
        .chain(d.fixed_points.iter().map(LyapunovKind::PhiCoord))
        .chain((1..=q).map(LyapunovKind::PsiCycle))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub kind: LyapunovKind,
    pub steps: usize,
    /// `min_{n >= 1} (v_{n+1} - v_n)`.
    pub min_increment: f64,
    /// `max_n |φ_i(x^{(n+1)}) - 2 x_m^{(n)} φ_i(x^{(n)})|`, for `phi_cycle` only.
    pub max_identity_error: Option<f64>,
}

impl LyapunovReport {
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.min_increment >= -tol
    }
}

/// Evaluates `kind` along `n` steps from `x0`.
pub fn check_lyapunov(
    spec: &OperatorSpec,
    x0: &SimplexPoint,
    n: usize,
    kind: LyapunovKind,
) -> Result<LyapunovReport> {
    kind.validate(spec)?;
    if n < 2 {
        return Err(QsoError::InvalidArgument("need at least 2 steps".into()));
    }
    let mut st = Stepper::new(spec, x0)?;
    let track_identity = matches!(kind, LyapunovKind::PhiCycle(_));
    let mut prev = kind.evaluate(spec, st.current());
    let mut min_increment = f64::INFINITY;
    let mut max_identity_error: f64 = 0.0;
    for step in 0..n {
        let xm = st.current()[spec.m() - 1];
        st.step();
        let v = kind.evaluate(spec, st.current());
        if track_identity {
            max_identity_error = max_identity_error.max((v - 2.0 * xm * prev).abs());
        }
        if step >= 1 {
            min_increment = min_increment.min(v - prev);
        }
        prev = v;
    }
    Ok(LyapunovReport {
        kind,
        steps: n,
        min_increment,
        max_identity_error: track_identity.then_some(max_identity_error),
    })
}
