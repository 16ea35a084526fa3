//! Quadratic stochastic operators built from a permutation.
//!
//! The operator `V_α` acts on the simplex of probability vectors in `R^m`:
//!
//! ```text
//! x'_k = 2 x_m (α x_k + (1 - α) x_{π(k)}),   k < m
//! x'_m = x_m² + (x_1 + ... + x_{m-1})²
//! ```
//!
//! where `π` permutes `{1, ..., m-1}`. The crate evaluates the operator and
//! its tensor form, enumerates fixed points and their stability, classifies
//! limit sets of orbits and checks the monotone quantities and invariant sets
//! that drive that classification.
//!
//! ```
//! use qso_core::{apply, make_point, OperatorSpec};
//!
//! let spec = OperatorSpec::parse(3, "(1 2)", 0.5).unwrap();
//! let x = make_point(&[0.25, 0.25, 0.5]).unwrap();
//! assert_eq!(apply(&spec, &x).unwrap(), x);
//! ```

// Index loops mirror the matrix formulas; `!(a <= b)` is used on purpose so
// NaN fails the check.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod instances;
pub mod io;
pub mod operator;
pub mod permutation;
pub mod simplex;
pub mod verify;

pub use dynamics::{
    cesaro_average, cesaro_schedule, check_invariant_set, check_lyapunov, detect_periodic_orbit,
    doubling_schedule, iterate, omega_limit, CesaroAverage, InvariantSet, InvariantSetReport,
    LyapunovKind, LyapunovReport, OmegaCase, OmegaLimitReport, PeriodicOrbit, Trajectory,
};
pub use error::{QsoError, Result};
pub use operator::{
    apply, apply_tensor, classify_fixed_point, fixed_points, is_volterra, jacobian, scalar_f,
    scalar_f_iterate, to_tensor, validate_tensor, FixedPointSet, OperatorSpec, QsoTensor,
    Stability, StabilityReport,
};
pub use permutation::{composite_order, decompose, parse_permutation, CycleDecomposition, Permutation};
pub use simplex::{l1_distance, make_point, support, IndexSet, SimplexPoint};
