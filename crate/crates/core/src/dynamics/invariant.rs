//! Sampling-based checks of the invariant sets
//! `Γ_β`, `M_{μ,i}` and `M_{ν,i,j}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Stepper;
use crate::error::{QsoError, Result};
use crate::operator::OperatorSpec;
use crate::simplex::{dirichlet_weights, IndexSet, SimplexPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "snake_case")]
pub enum InvariantSet {
    /// `{ x : x_i = 0 for i ∈ β }`, `β` made of fixed points of `π`.
    GammaBeta { beta: IndexSet },
    /// `{ x : Σ_{supp τ_i} x_k = μ, x_m = 1/2 }`.
    MMu { cycle: usize, mu: f64 },
    /// `{ x : Σ_{supp τ_i} x_k = ν Σ_{supp τ_j} x_k }`.
    MNu { i: usize, j: usize, nu: f64 },
}

fn cycle_sum(spec: &OperatorSpec, i: usize, x: &[f64]) -> f64 {
    spec.decomposition().cycles[i - 1].iter().map(|&k| x[k - 1]).sum()
}

impl InvariantSet {
    pub fn validate(&self, spec: &OperatorSpec) -> Result<()> {
        let d = spec.decomposition();
        let q = d.num_cycles();
        let bad = |msg: String| Err(QsoError::InvalidDescriptor(msg));
        match self {
            Self::GammaBeta { beta } => {
                if let Some(i) = beta.iter().find(|&i| !d.fixed_points.contains(i)) {
                    return bad(format!("{i} is not a fixed point of π"));
                }
            }
            Self::MMu { cycle, mu } => {
                if *cycle == 0 || *cycle > q {
                    return bad(format!("cycle {cycle} out of 1..={q}"));
                }
                if !(0.0..=0.5).contains(mu) {
                    return bad(format!("μ = {mu} outside [0, 1/2]"));
                }
                let t = d.cycles[cycle - 1].len();
                if t == spec.m() - 1 && (mu - 0.5).abs() > 1e-12 {
                    return bad(format!("cycle {cycle} covers every coordinate, so μ must be 1/2"));
                }
            }
            Self::MNu { i, j, nu } => {
                if *i == 0 || *i > q || *j == 0 || *j > q || i == j {
                    return bad(format!("need distinct cycles in 1..={q}, got {i}, {j}"));
                }
                if !(*nu > 0.0 && nu.is_finite()) {
                    return bad(format!("ν = {nu} must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Distance of `x` from the set's defining equations.
    pub fn violation(&self, spec: &OperatorSpec, x: &[f64]) -> f64 {
        match self {
            Self::GammaBeta { beta } => beta.iter().map(|i| x[i - 1].abs()).fold(0.0, f64::max),
            Self::MMu { cycle, mu } => {
                (cycle_sum(spec, *cycle, x) - mu).abs().max((x[spec.m() - 1] - 0.5).abs())
            }
            Self::MNu { i, j, nu } => (cycle_sum(spec, *i, x) - nu * cycle_sum(spec, *j, x)).abs(),
        }
    }

    /// A random member of the set.
    pub fn sample(&self, spec: &OperatorSpec, rng: &mut ChaCha8Rng) -> SimplexPoint {
        let m = spec.m();
        let mut x = dirichlet_weights(m, rng);
        match self {
            Self::GammaBeta { beta } => {
                for i in beta.iter() {
                    x[i - 1] = 0.0;
                }
            }
            Self::MMu { cycle, mu } => {
                let members = &spec.decomposition().cycles[cycle - 1];
                let others: Vec<usize> = (1..m).filter(|k| !members.contains(k)).collect();
                x = vec![0.0; m];
                for (&k, w) in members.iter().zip(dirichlet_weights(members.len(), rng)) {
                    x[k - 1] = mu * w;
                }
                if !others.is_empty() {
                    for (&k, w) in others.iter().zip(dirichlet_weights(others.len(), rng)) {
                        x[k - 1] = (0.5 - mu) * w;
                    }
                }
                x[m - 1] = 0.5;
                return SimplexPoint::new(x).expect("sampled member of M_mu");
            }
            Self::MNu { i, j, nu } => {
                let si = cycle_sum(spec, *i, &x);
                let sj = cycle_sum(spec, *j, &x);
                let scale = nu * sj / si;
                for &k in &spec.decomposition().cycles[i - 1] {
                    x[k - 1] *= scale;
                }
            }
        }
        let total: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= total);
        SimplexPoint::new(x).expect("normalized sample")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSetReport {
    pub set: InvariantSet,
    pub samples: usize,
    pub steps: usize,
    /// Largest violation at the sampled starting points.
    pub initial_violation: f64,
    /// Largest violation over all samples and steps.
    pub max_violation: f64,
}

/// Samples `n_samples` members of `d`, iterates each `n_steps` times and
/// records the worst constraint violation seen.
pub fn check_invariant_set(
    spec: &OperatorSpec,
    d: &InvariantSet,
    n_samples: usize,
    n_steps: usize,
    seed: u64,
) -> Result<InvariantSetReport> {
    d.validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut initial_violation: f64 = 0.0;
    let mut max_violation: f64 = 0.0;
    for _ in 0..n_samples {
        let x0 = d.sample(spec, &mut rng);
        let v0 = d.violation(spec, x0.coords());
        initial_violation = initial_violation.max(v0);
        max_violation = max_violation.max(v0);
        let mut st = Stepper::new(spec, &x0)?;
        for _ in 0..n_steps {
            st.step();
            max_violation = max_violation.max(d.violation(spec, st.current()));
        }
    }
    Ok(InvariantSetReport {
        set: d.clone(),
        samples: n_samples,
        steps: n_steps,
        initial_violation,
        max_violation,
    })
}
