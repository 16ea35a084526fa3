//! Points of the closed simplex and the index sets used to describe supports.
//!
//! Coordinates are stored 0-based internally; every public index (supports,
//! cycle elements, coordinate labels) is 1-based so that coordinate `m` is
//! the distinguished last coordinate.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QsoError, Result};

/// Sum tolerance a point satisfies after construction.
pub const SUM_TOL: f64 = 1e-12;
/// Inputs whose sum is off by at most this much are renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;
/// Most negative coordinate accepted (and clamped to zero).
pub const NEGATIVE_TOL: f64 = 1e-12;

/// A probability vector in the closed simplex `S^{m-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    /// Validates `coords` as a point of the closed simplex.
    ///
    /// Sums within [`SUM_TOL`] of one are kept verbatim; sums within
    /// [`RENORMALIZE_TOL`] are divided out; anything further is rejected.
    /// Negative coordinates down to `-NEGATIVE_TOL` are clamped to zero.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(QsoError::TooShort(coords.len()));
        }
        let mut coords = coords;
        for (index, c) in coords.iter_mut().enumerate() {
            if !c.is_finite() {
                return Err(QsoError::NonFinite { index: index + 1 });
            }
            if *c < -NEGATIVE_TOL {
                return Err(QsoError::NegativeCoordinate {
                    index: index + 1,
                    value: *c,
                });
            }
            if *c < 0.0 {
                *c = 0.0;
            }
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(QsoError::NotNormalized { sum });
        }
        if (sum - 1.0).abs() > SUM_TOL {
            coords.iter_mut().for_each(|c| *c /= sum);
        }
        Ok(Self { coords })
    }

    /// Wraps coordinates produced by a map known to preserve the simplex.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(coords.len() >= 2);
        debug_assert!(coords.iter().all(|c| *c >= 0.0));
        Self { coords }
    }

    /// The vertex `e_i` (1-based).
    pub fn vertex(m: usize, i: usize) -> Result<Self> {
        if m < 2 {
            return Err(QsoError::TooShort(m));
        }
        if i == 0 || i > m {
            return Err(QsoError::IndexOutOfRange { index: i, max: m });
        }
        let mut coords = vec![0.0; m];
        coords[i - 1] = 1.0;
        Ok(Self { coords })
    }

    /// The barycenter `(1/m, ..., 1/m)`.
    pub fn barycenter(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(QsoError::TooShort(m));
        }
        Ok(Self {
            coords: vec![1.0 / m as f64; m],
        })
    }

    /// Uniform (Dirichlet(1, ..., 1)) draw on the simplex.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self> {
        if m < 2 {
            return Err(QsoError::TooShort(m));
        }
        Ok(Self {
            coords: dirichlet_weights(m, rng),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Coordinate `x_k`, 1-based.
    pub fn get(&self, k: usize) -> f64 {
        self.coords[k - 1]
    }

    /// The distinguished last coordinate `x_m`.
    pub fn last(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// True when every coordinate exceeds `eps`.
    pub fn is_interior(&self, eps: f64) -> bool {
        self.coords.iter().all(|c| *c > eps)
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = QsoError;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Self {
        p.coords
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Positive weights summing to one, drawn from Dirichlet(1, ..., 1).
pub(crate) fn dirichlet_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    // Exp(1) draws; 1 - u lies in (0, 1] so the log is finite.
    let mut w: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|v| *v /= total);
    } else {
        w.iter_mut().for_each(|v| *v = 1.0 / n as f64);
    }
    w
}

/// Validating constructor, see [`SimplexPoint::new`].
pub fn make_point(coords: &[f64]) -> Result<SimplexPoint> {
    SimplexPoint::new(coords.to_vec())
}

/// `Σ |a_i - b_i|`.
pub fn l1_distance(a: &SimplexPoint, b: &SimplexPoint) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(QsoError::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(l1(a.coords(), b.coords()))
}

pub(crate) fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Sorted set of 1-based indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Builds a set of indices from `1..=max`, rejecting duplicates.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>, max: usize) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        for &i in &v {
            if i == 0 || i > max {
                return Err(QsoError::IndexOutOfRange { index: i, max });
            }
        }
        v.sort_unstable();
        let len = v.len();
        v.dedup();
        if v.len() != len {
            return Err(QsoError::InvalidArgument("duplicate index".into()));
        }
        Ok(Self(v))
    }

    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// `supp(x) = { i : x_i > eps }`.
pub fn support(x: &SimplexPoint, eps: f64) -> IndexSet {
    IndexSet::from_sorted(
        x.coords()
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > eps)
            .map(|(i, _)| i + 1)
            .collect(),
    )
}
