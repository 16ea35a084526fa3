//! Trajectories of `V_α` and the analyses run along them.

mod ergodic;
mod invariant;
mod lyapunov;
mod omega;

pub use ergodic::{cesaro_average, cesaro_schedule, doubling_schedule, CesaroAverage};
pub use invariant::{check_invariant_set, InvariantSet, InvariantSetReport};
pub use lyapunov::{check_lyapunov, lyapunov_kinds, LyapunovKind, LyapunovReport};
pub use omega::{
    block_fractions, detect_periodic_orbit, omega_limit, ConservedQuantities, OmegaCase,
    OmegaLimitReport, PeriodicOrbit, DEFAULT_BURN_IN, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{QsoError, Result};
use crate::operator::OperatorSpec;
use crate::simplex::{l1, SimplexPoint};

/// Two-buffer iteration state; avoids allocating per step.
pub(crate) struct Stepper<'a> {
    spec: &'a OperatorSpec,
    cur: Vec<f64>,
    next: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(spec: &'a OperatorSpec, x0: &SimplexPoint) -> Result<Self> {
        check_dim(spec, x0)?;
        Ok(Self {
            spec,
            cur: x0.coords().to_vec(),
            next: vec![0.0; spec.m()],
        })
    }

    #[inline]
    pub(crate) fn current(&self) -> &[f64] {
        &self.cur
    }

    /// Advances one step and returns `‖x^{(n+1)} - x^{(n)}‖₁`.
    #[inline]
    pub(crate) fn step(&mut self) -> f64 {
        self.spec.apply_into(&self.cur, &mut self.next);
        let d = l1(&self.cur, &self.next);
        std::mem::swap(&mut self.cur, &mut self.next);
        d
    }

    pub(crate) fn point(&self) -> SimplexPoint {
        SimplexPoint::from_raw(self.cur.clone())
    }
}

pub(crate) fn check_dim(spec: &OperatorSpec, x: &SimplexPoint) -> Result<()> {
    if x.dim() != spec.m() {
        return Err(QsoError::DimensionMismatch {
            expected: spec.m(),
            actual: x.dim(),
        });
    }
    Ok(())
}

/// The orbit `x^{(0)}, ..., x^{(N)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub spec: OperatorSpec,
    pub points: Vec<SimplexPoint>,
}

impl Trajectory {
    /// Number of steps `N`.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    /// Largest `‖V(x^{(n)}) - x^{(n+1)}‖₁` over the stored points.
    pub fn replay_error(&self) -> f64 {
        let mut buf = vec![0.0; self.spec.m()];
        self.points
            .windows(2)
            .map(|w| {
                self.spec.apply_into(w[0].coords(), &mut buf);
                l1(&buf, w[1].coords())
            })
            .fold(0.0, f64::max)
    }
}

/// Runs `n` steps from `x0`, keeping every point.
pub fn iterate(spec: &OperatorSpec, x0: &SimplexPoint, n: usize) -> Result<Trajectory> {
    let mut points = Vec::with_capacity(n + 1);
    for_each_iterate(spec, x0, n, |_, x| points.push(SimplexPoint::from_raw(x.to_vec())))?;
    Ok(Trajectory {
        spec: spec.clone(),
        points,
    })
}

/// Calls `visit(k, x^{(k)})` for `k = 0, ..., n` without storing the orbit.
pub fn for_each_iterate<F>(spec: &OperatorSpec, x0: &SimplexPoint, n: usize, mut visit: F) -> Result<()>
where
    F: FnMut(usize, &[f64]),
{
    let mut st = Stepper::new(spec, x0)?;
    visit(0, st.current());
    for k in 1..=n {
        st.step();
        visit(k, st.current());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::scalar_f;
    use crate::simplex::make_point;

    fn spec(m: usize, perm: &str, alpha: f64) -> OperatorSpec {
        OperatorSpec::parse(m, perm, alpha).unwrap()
    }

    #[test]
    fn vertex_trajectory_is_constant() {
        let e = SimplexPoint::vertex(4, 4).unwrap();
        let t = iterate(&spec(4, "(1 2 3)", 0.2), &e, 10).unwrap();
        assert_eq!(t.points.len(), 11);
        assert!(t.points.iter().all(|p| *p == e));
    }

    #[test]
    fn boundary_face_jumps_to_vertex() {
        let x0 = make_point(&[0.3, 0.7, 0.0]).unwrap();
        let t = iterate(&spec(3, "(1 2)", 0.4), &x0, 5).unwrap();
        let e = SimplexPoint::vertex(3, 3).unwrap();
        for p in &t.points[1..] {
            assert_eq!(*p, e);
        }
    }

    #[test]
    fn single_step_example() {
        let x0 = make_point(&[1.0 / 3.0; 3]).unwrap();
        let t = iterate(&spec(3, "(1 2)", 0.5), &x0, 1).unwrap();
        assert_eq!(t.points[0], x0);
        for (a, b) in t.points[1].coords().iter().zip([2.0 / 9.0, 2.0 / 9.0, 5.0 / 9.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(t.steps(), 1);
    }

    #[test]
    fn replay_and_last_coordinate() {
        let x0 = make_point(&[0.05, 0.1, 0.2, 0.25, 0.1, 0.3]).unwrap();
        let s = spec(6, "(1 3 5)(2 4)", 0.3);
        let t = iterate(&s, &x0, 200).unwrap();
        assert!(t.replay_error() <= 1e-12);
        for w in t.points.windows(2) {
            assert!((w[1].last() - scalar_f(w[0].last()).unwrap()).abs() <= 1e-15);
        }
        for p in &t.points[1..] {
            assert!(p.last() >= 0.5 - 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let x0 = make_point(&[0.5, 0.5]).unwrap();
        assert!(matches!(
            iterate(&spec(3, "Id", 0.5), &x0, 3),
            Err(QsoError::DimensionMismatch { .. })
        ));
    }
}
