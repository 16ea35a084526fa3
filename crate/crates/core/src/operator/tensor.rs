//! General quadratic stochastic operators given by heredity coefficients
//! `p_{ij,k}`, and the tensor realization of `V_α`.

use serde::{Deserialize, Serialize};

use super::OperatorSpec;
use crate::error::{QsoError, Result};
use crate::simplex::SimplexPoint;

/// Tolerance for the normalization and symmetry conditions.
pub const TENSOR_TOL: f64 = 1e-12;

/// Heredity coefficients `p_{ij,k}`, `1 <= i, j, k <= m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QsoTensor {
    m: usize,
    p: Vec<f64>,
}

impl QsoTensor {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            p: vec![0.0; m * m * m],
        }
    }

    /// Fills every coefficient from `f(i, j, k)` (1-based).
    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(m);
        for i in 1..=m {
            for j in 1..=m {
                for k in 1..=m {
                    t.set(i, j, k, f(i, j, k));
                }
            }
        }
        t
    }

    /// `p_{ij,k} = 1/m` for every triple.
    pub fn uniform(m: usize) -> Self {
        Self::from_fn(m, |_, _, _| 1.0 / m as f64)
    }

    /// The Volterra operator where offspring copy one parent at random:
    /// `p_{ii,i} = 1`, `p_{ij,i} = p_{ij,j} = 1/2`.
    pub fn identity_heredity(m: usize) -> Self {
        Self::from_fn(m, |i, j, k| match (i == j, k == i || k == j) {
            (true, true) => 1.0,
            (false, true) => 0.5,
            _ => 0.0,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!((1..=self.m).contains(&i) && (1..=self.m).contains(&j) && (1..=self.m).contains(&k));
        ((i - 1) * self.m + (j - 1)) * self.m + (k - 1)
    }

    /// `p_{ij,k}`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.p[self.idx(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.idx(i, j, k);
        self.p[n] = v;
    }

    fn add_sym(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.idx(i, j, k);
        self.p[n] += v;
        if i != j {
            let n = self.idx(j, i, k);
            self.p[n] += v;
        }
    }
}

/// A condition on the heredity coefficients that does not hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TensorViolation {
    Negative { i: usize, j: usize, k: usize, value: f64 },
    Asymmetric { i: usize, j: usize, k: usize, pij: f64, pji: f64 },
    NotNormalized { i: usize, j: usize, sum: f64 },
}

/// The coefficients realizing `V_α`: `p_{km,k} = α`, `p_{π(k)m,k} = 1 - α`
/// (merged when `π(k) = k`), `p_{mm,m} = 1` and `p_{ij,m} = 1` for `i, j < m`.
pub fn to_tensor(spec: &OperatorSpec) -> QsoTensor {
    let m = spec.m();
    let mut t = QsoTensor::zeros(m);
    for k in 1..m {
        let pk = spec.pi().images()[k - 1];
        t.add_sym(k, m, k, spec.alpha());
        t.add_sym(pk, m, k, 1.0 - spec.alpha());
    }
    t.set(m, m, m, 1.0);
    for i in 1..m {
        for j in 1..m {
            t.set(i, j, m, 1.0);
        }
    }
    t
}

/// `(Vx)_k = Σ_{i,j} p_{ij,k} x_i x_j`.
pub fn apply_tensor(t: &QsoTensor, x: &SimplexPoint) -> Result<SimplexPoint> {
    let m = t.m;
    if x.dim() != m {
        return Err(QsoError::DimensionMismatch {
            expected: m,
            actual: x.dim(),
        });
    }
    let c = x.coords();
    let mut out = vec![0.0; m];
    for i in 0..m {
        if c[i] == 0.0 {
            continue;
        }
        for j in 0..m {
            let w = c[i] * c[j];
            if w == 0.0 {
                continue;
            }
            let row = &t.p[(i * m + j) * m..(i * m + j + 1) * m];
            for (o, p) in out.iter_mut().zip(row) {
                *o += p * w;
            }
        }
    }
    SimplexPoint::new(out)
}

/// Lists every violated condition: non-negativity, symmetry in `(i, j)` and
/// `Σ_k p_{ij,k} = 1`. An empty list means the tensor is a valid QSO.
pub fn validate_tensor(t: &QsoTensor) -> Vec<TensorViolation> {
    let m = t.m;
    let mut out = Vec::new();
    for i in 1..=m {
        for j in 1..=m {
            for k in 1..=m {
                let v = t.get(i, j, k);
                if v < 0.0 || !v.is_finite() {
                    out.push(TensorViolation::Negative { i, j, k, value: v });
                }
                if i < j {
                    let w = t.get(j, i, k);
                    if (v - w).abs() > TENSOR_TOL || v.is_nan() != w.is_nan() {
                        out.push(TensorViolation::Asymmetric { i, j, k, pij: v, pji: w });
                    }
                }
            }
            let sum: f64 = (1..=m).map(|k| t.get(i, j, k)).sum();
            if !((sum - 1.0).abs() <= TENSOR_TOL) {
                out.push(TensorViolation::NotNormalized { i, j, sum });
            }
        }
    }
    out
}

/// True when `p_{ij,k} <= tol` for every `k ∉ {i, j}`.
pub fn is_volterra(t: &QsoTensor, tol: f64) -> bool {
    let m = t.m;
    (1..=m).all(|i| {
        (1..=m).all(|j| (1..=m).filter(|&k| k != i && k != j).all(|k| t.get(i, j, k) <= tol))
    })
}
