//! The operator family `V_α`, its tensor form, Jacobians and fixed points.
//!
//! For a permutation `π` of `{1, ..., m-1}` and `α ∈ [0, 1]`:
//!
//! ```text
//! x'_k = 2 x_m (α x_k + (1 - α) x_{π(k)}),   k = 1, ..., m-1
//! x'_m = x_m² + (x_1 + ... + x_{m-1})²
//! ```
//!
//! `α = 0` is the pure permutation operator and `α = 1` the identity one.

mod fixed;
mod scalar;
mod tensor;

pub use fixed::{
    analytic_vertex_eigenvalues, classify_fixed_point, classify_moduli, fixed_point_residual,
    fixed_points, x_membership, FixedPointSet, Stability, StabilityReport, XDescription,
    XMembership, UNIT_CIRCLE_TOL,
};
pub use scalar::{iterate_fixed_points, scalar_f, scalar_f_iterate};
pub use tensor::{apply_tensor, is_volterra, to_tensor, validate_tensor, QsoTensor, TensorViolation};

use serde::{Deserialize, Serialize};

use crate::eigen::Matrix;
use crate::error::{QsoError, Result};
use crate::permutation::{decompose, parse_permutation, CycleDecomposition, Permutation};
use crate::simplex::SimplexPoint;

/// Parameters `(m, π, α)` of one operator `V_α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct OperatorSpec {
    m: usize,
    pi: Permutation,
    alpha: f64,
    decomp: CycleDecomposition,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    m: usize,
    perm: String,
    alpha: f64,
}

impl TryFrom<SpecRepr> for OperatorSpec {
    type Error = QsoError;

    fn try_from(r: SpecRepr) -> Result<Self> {
        OperatorSpec::parse(r.m, &r.perm, r.alpha)
    }
}

impl From<OperatorSpec> for SpecRepr {
    fn from(s: OperatorSpec) -> Self {
        SpecRepr {
            m: s.m,
            perm: s.pi.to_string(),
            alpha: s.alpha,
        }
    }
}

impl OperatorSpec {
    pub fn new(m: usize, pi: Permutation, alpha: f64) -> Result<Self> {
        if m < 2 {
            return Err(QsoError::TooShort(m));
        }
        if pi.len() != m - 1 {
            return Err(QsoError::DimensionMismatch {
                expected: m - 1,
                actual: pi.len(),
            });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(QsoError::AlphaOutOfRange(alpha));
        }
        let decomp = decompose(&pi);
        Ok(Self {
            m,
            pi,
            alpha,
            decomp,
        })
    }

    /// Builds a spec from permutation text (see [`parse_permutation`]).
    pub fn parse(m: usize, perm: &str, alpha: f64) -> Result<Self> {
        if m < 2 {
            return Err(QsoError::TooShort(m));
        }
        Self::new(m, parse_permutation(perm, m - 1)?, alpha)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn decomposition(&self) -> &CycleDecomposition {
        &self.decomp
    }

    /// Same `m` and `π` with a different `α`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.m, self.pi.clone(), alpha)
    }

    /// Writes `V_α(x)` into `out`. Both slices must have length `m`.
    ///
    /// The last coordinate uses `x_1 + ... + x_{m-1} = 1 - x_m`, so it is
    /// exactly `x_m² + (1 - x_m)²` and the vertex `e_m` and the boundary face
    /// `x_m = 0` map onto `e_m` without rounding.
    #[inline]
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let m = self.m;
        debug_assert_eq!(x.len(), m);
        debug_assert_eq!(out.len(), m);
        let xm = x[m - 1];
        let two_xm = 2.0 * xm;
        let a = self.alpha;
        let b = 1.0 - a;
        for k in 0..m - 1 {
            out[k] = two_xm * (a * x[k] + b * x[self.pi.image0(k)]);
        }
        let rest = 1.0 - xm;
        out[m - 1] = xm * xm + rest * rest;
    }
}

fn check_dim(spec: &OperatorSpec, x: &SimplexPoint) -> Result<()> {
    if x.dim() != spec.m {
        return Err(QsoError::DimensionMismatch {
            expected: spec.m,
            actual: x.dim(),
        });
    }
    Ok(())
}

/// `V_α(x)`.
pub fn apply(spec: &OperatorSpec, x: &SimplexPoint) -> Result<SimplexPoint> {
    check_dim(spec, x)?;
    let mut out = vec![0.0; spec.m];
    spec.apply_into(x.coords(), &mut out);
    Ok(SimplexPoint::from_raw(out))
}

/// The defining polynomial map evaluated on all of `R^m`, with the last
/// coordinate written as `x_m² + (Σ_{i<m} x_i)²`. [`jacobian`] is its
/// derivative.
pub fn ambient_map(spec: &OperatorSpec, x: &[f64]) -> Result<Vec<f64>> {
    let m = spec.m;
    if x.len() != m {
        return Err(QsoError::DimensionMismatch {
            expected: m,
            actual: x.len(),
        });
    }
    let xm = x[m - 1];
    let s: f64 = x[..m - 1].iter().sum();
    let mut out: Vec<f64> = (0..m - 1)
        .map(|k| 2.0 * xm * (spec.alpha * x[k] + (1.0 - spec.alpha) * x[spec.pi.image0(k)]))
        .collect();
    out.push(xm * xm + s * s);
    Ok(out)
}

/// Jacobian `∂V_k/∂x_j` in the ambient coordinates of `R^m`.
pub fn jacobian(spec: &OperatorSpec, x: &SimplexPoint) -> Result<Matrix> {
    check_dim(spec, x)?;
    let m = spec.m;
    let c = x.coords();
    let xm = c[m - 1];
    let a = spec.alpha;
    let b = 1.0 - a;
    let mut jac = vec![vec![0.0; m]; m];
    for k in 0..m - 1 {
        let pk = spec.pi.image0(k);
        jac[k][k] += 2.0 * xm * a;
        jac[k][pk] += 2.0 * xm * b;
        jac[k][m - 1] = 2.0 * (a * c[k] + b * c[pk]);
    }
    let s: f64 = c[..m - 1].iter().sum();
    for j in 0..m - 1 {
        jac[m - 1][j] = 2.0 * s;
    }
    jac[m - 1][m - 1] = 2.0 * xm;
    Ok(jac)
}
