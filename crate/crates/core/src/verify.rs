//! Seeded property sweeps over random operators and starting points.
//!
//! Each property draws `instances` independent cases from a per-instance
//! seed, checks them in parallel (see [`crate::batch`]) and reports the
//! worst residual against its tolerance. The same seed always gives the same
//! summary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::batch;
use crate::dynamics::{
    cesaro_schedule, check_invariant_set, check_lyapunov, detect_periodic_orbit, doubling_schedule,
    iterate, lyapunov_kinds, omega_limit, InvariantSet, OmegaCase, DEFAULT_BURN_IN,
    DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use crate::eigen::{eigenvalues, max_matching_distance};
use crate::error::{QsoError, Result};
use crate::instances::{
    instance_seed, random_boundary_point, random_interior_point, random_permutation, random_spec,
    AlphaChoice, SpecSampler,
};
use crate::io::{read_trajectory, TrajectoryWriter};
use crate::operator::{
    ambient_map, analytic_vertex_eigenvalues, apply, apply_tensor, fixed_point_residual,
    fixed_points, iterate_fixed_points, jacobian, scalar_f, scalar_f_iterate, to_tensor,
    validate_tensor, OperatorSpec, QsoTensor,
};
use crate::permutation::{composite_order, decompose, Permutation};
use crate::simplex::{l1, IndexSet, SimplexPoint};

pub const PROPERTY_NAMES: &[&str] = &[
    "simplex-preservation",
    "coordinate-m-autonomy",
    "tensor-equivalence",
    "tensor-validation",
    "convex-combination",
    "scalar-f-range",
    "scalar-f-no-periodic",
    "jacobian-fd",
    "vertex-eigenvalues",
    "fixed-points",
    "omega-limit",
    "periodic-orbit",
    "boundary-to-vertex",
    "lyapunov",
    "invariant-sets",
    "ergodic",
    "permutation-order",
    "trajectory-replay",
];

/// `‖A_N - orbit mean‖₁` bound used by the `ergodic` sweep. The error decays
/// like `1/N` with a constant set by the transient, so this is looser than a
/// fixed `1e-6` at `N = 10^5` (see the README).
pub const ERGODIC_TOL: f64 = 1e-4;

/// Orbit length used by the `ergodic` sweep.
pub const ERGODIC_N: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub instances: usize,
    /// Corrupt the tensor fixture of `tensor-validation` so it must fail.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            instances: 50,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
    /// First failing instance, if any.
    pub first_failure: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub instances: usize,
    pub passed: bool,
    pub properties: Vec<PropertyOutcome>,
}

/// Runs the named properties (all of them when `names` is empty), in the
/// order of [`PROPERTY_NAMES`].
pub fn run_verify(names: &[String], opts: &VerifyOptions) -> Result<VerifySummary> {
    if let Some(bad) = names.iter().find(|n| !PROPERTY_NAMES.contains(&n.as_str())) {
        return Err(QsoError::InvalidArgument(format!(
            "unknown property {bad:?}; known: {}",
            PROPERTY_NAMES.join(", ")
        )));
    }
    let properties: Vec<PropertyOutcome> = PROPERTY_NAMES
        .iter()
        .filter(|p| names.is_empty() || names.iter().any(|n| n == *p))
        .map(|p| run_property(p, opts))
        .collect::<Result<_>>()?;
    Ok(VerifySummary {
        seed: opts.seed,
        instances: opts.instances,
        passed: properties.iter().all(|p| p.passed),
        properties,
    })
}

/// One case: the residual that is compared against the tolerance, and
/// whether every check of the case held.
struct Case {
    residual: f64,
    ok: bool,
}

impl Case {
    fn within(residual: f64, tol: f64) -> Self {
        Self {
            residual,
            ok: residual <= tol,
        }
    }

    fn fail(residual: f64) -> Self {
        Self { residual, ok: false }
    }
}

fn name_salt(name: &str) -> u64 {
    // FNV-1a, so every property draws its own stream
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn sweep<F>(name: &str, tol: f64, n: usize, opts: &VerifyOptions, case: F) -> PropertyOutcome
where
    F: Fn(&mut ChaCha8Rng) -> Case + Sync + Send,
{
    let salt = opts.seed ^ name_salt(name);
    let cases = batch::map_range(n, |i| case(&mut ChaCha8Rng::seed_from_u64(instance_seed(salt, i))));
    let first_failure = cases.iter().position(|c| !c.ok);
    PropertyOutcome {
        name: name.to_string(),
        passed: first_failure.is_none(),
        instances: n,
        failures: cases.iter().filter(|c| !c.ok).count(),
        worst_residual: cases.iter().map(|c| c.residual).fold(0.0, f64::max),
        tolerance: tol,
        first_failure,
    }
}

pub fn run_property(name: &str, opts: &VerifyOptions) -> Result<PropertyOutcome> {
    let n = opts.instances;
    let any = SpecSampler::default();
    let case_ii = SpecSampler {
        m_min: 3,
        m_max: 8,
        alpha: AlphaChoice::Grid((1..=9).map(|k| k as f64 / 10.0).collect()),
        non_identity: true,
    };
    let case_iii = SpecSampler {
        m_min: 3,
        m_max: 8,
        alpha: AlphaChoice::Fixed(0.0),
        non_identity: true,
    };
    let out = match name {
        "simplex-preservation" => sweep(name, 1e-12, n, opts, |rng| {
            let spec = random_spec(rng, &any);
            let mut worst: f64 = 0.0;
            for i in 0..10 {
                let x = if i % 2 == 0 {
                    random_interior_point(spec.m(), rng)
                } else {
                    SimplexPoint::random(spec.m(), rng).expect("m >= 2")
                };
                let y = apply(&spec, &x).expect("dims agree");
                let sum: f64 = y.coords().iter().sum();
                let neg = y.coords().iter().fold(0.0_f64, |a, &v| a.max(-v));
                worst = worst.max((sum - 1.0).abs()).max(neg);
            }
            Case::within(worst, 1e-12)
        }),
        "coordinate-m-autonomy" => sweep(name, 1e-15, n, opts, |rng| {
            let spec = random_spec(rng, &any);
            let x0 = random_interior_point(spec.m(), rng);
            let t = iterate(&spec, &x0, 50).expect("dims agree");
            let mut worst: f64 = 0.0;
            let mut below_half = false;
            for (n, w) in t.points.windows(2).enumerate() {
                let f = scalar_f(w[0].last()).expect("x_m in [0, 1]");
                worst = worst.max((w[1].last() - f).abs());
                if n >= 1 && w[0].last() < 0.5 - 1e-12 {
                    below_half = true;
                }
            }
            let c = Case::within(worst, 1e-15);
            Case { ok: c.ok && !below_half, ..c }
        }),
        "tensor-equivalence" => sweep(name, 1e-12, n, opts, |rng| {
            let spec = random_spec(rng, &any);
            let t = to_tensor(&spec);
            let worst = (0..10)
                .map(|_| {
                    let x = SimplexPoint::random(spec.m(), rng).expect("m >= 2");
                    let a = apply(&spec, &x).expect("dims agree");
                    let b = apply_tensor(&t, &x).expect("dims agree");
                    l1(a.coords(), b.coords())
                })
                .fold(0.0, f64::max);
            Case::within(worst, 1e-12)
        }),
        "tensor-validation" => sweep(name, 0.0, n, opts, |rng| {
            let spec = random_spec(rng, &any);
            let mut fixture = to_tensor(&spec);
            if opts.inject_fault {
                corrupt(&mut fixture);
            }
            let violations = validate_tensor(&fixture).len();
            // negative control: the checker must notice a corrupted copy
            let mut control = to_tensor(&spec);
            corrupt(&mut control);
            let control_caught = !validate_tensor(&control).is_empty();
            Case {
                residual: violations as f64,
                ok: violations == 0 && control_caught,
            }
        }),
        "convex-combination" => sweep(name, 1e-12, n, opts, |rng| {
            let spec = random_spec(rng, &any);
            let one = spec.with_alpha(1.0).expect("alpha in range");
            let zero = spec.with_alpha(0.0).expect("alpha in range");
            let a = spec.alpha();
            let worst = (0..10)
                .map(|_| {
                    let x = SimplexPoint::random(spec.m(), rng).expect("m >= 2");
                    let y = apply(&spec, &x).expect("dims agree");
                    let y1 = apply(&one, &x).expect("dims agree");
                    let y0 = apply(&zero, &x).expect("dims agree");
                    y.coords()
                        .iter()
                        .zip(y1.coords().iter().zip(y0.coords()))
                        .map(|(v, (v1, v0))| (v - (a * v1 + (1.0 - a) * v0)).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            Case::within(worst, 1e-12)
        }),
        "scalar-f-range" => sweep(name, 1e-12, 1, opts, |_| {
            let ends_ok = scalar_f(0.0) == Ok(1.0) && scalar_f(1.0) == Ok(1.0);
            let mut range_ok = true;
            let mut worst: f64 = 0.0;
            for i in 1..1000 {
                let x = i as f64 / 1000.0;
                let fx = scalar_f(x).expect("in domain");
                range_ok &= (0.5..=1.0).contains(&fx) && (x == 0.5 || fx > 0.5);
                worst = worst.max((scalar_f_iterate(x, 50).expect("in domain") - 0.5).abs());
            }
            let c = Case::within(worst, 1e-12);
            Case { ok: c.ok && ends_ok && range_ok, ..c }
        }),
        "scalar-f-no-periodic" => sweep(name, 1e-9, 5, opts, |rng| {
            // instance i scans f^{i+2}; the rng only jitters the grid size
            let n = 2 + rng.random_range(0..5);
            let samples = 100_000 + rng.random_range(0..1000);
            let roots = iterate_fixed_points(n, samples, 1e-12);
            let dist = |r: f64| (r - 0.5).abs().min((r - 1.0).abs());
            let worst = roots.iter().map(|&r| dist(r)).fold(0.0, f64::max);
            let has_both = roots.iter().any(|&r| (r - 0.5).abs() <= 1e-9)
                && roots.iter().any(|&r| (r - 1.0).abs() <= 1e-9);
            let c = Case::within(worst, 1e-9);
            Case { ok: c.ok && has_both, ..c }
        }),
        "jacobian-fd" => sweep(name, 1e-6, n, opts, |rng| {
            let spec = random_spec(rng, &any);
            let x = random_interior_point(spec.m(), rng);
            Case::within(jacobian_fd_error(&spec, &x, 1e-6), 1e-6)
        }),
        "vertex-eigenvalues" => sweep(name, 1e-8, n, opts, |rng| {
            let spec = random_spec(rng, &SpecSampler { m_max: 8, ..any.clone() });
            let e = SimplexPoint::vertex(spec.m(), spec.m()).expect("m >= 2");
            match eigenvalues(&jacobian(&spec, &e).expect("dims agree")) {
                Ok(ev) => Case::within(max_matching_distance(&ev, &analytic_vertex_eigenvalues(&spec)), 1e-8),
                Err(_) => Case::fail(f64::INFINITY),
            }
        }),
        "fixed-points" => sweep(name, 1e-12, n, opts, |rng| {
            let spec = random_spec(rng, &any);
            let set = fixed_points(&spec, 5, rng.random());
            let mut worst = fixed_point_residual(&spec, &set.vertex).expect("dims agree");
            let mut off_ok = true;
            for r in &set.representatives {
                worst = worst.max(fixed_point_residual(&spec, r).expect("dims agree"));
                let off = perturb_off_x(r, rng);
                off_ok &= fixed_point_residual(&spec, &off).expect("dims agree") >= 1e-6;
            }
            let c = Case::within(worst, 1e-12);
            Case { ok: c.ok && off_ok, ..c }
        }),
        "omega-limit" => sweep(name, 1e-8, n, opts, |rng| {
            let spec = random_spec(rng, &case_ii);
            let x0 = random_interior_point(spec.m(), rng);
            match omega_limit(&spec, &x0, DEFAULT_MAX_ITERS, DEFAULT_TOL) {
                Ok(r) if r.case == OmegaCase::InteriorToX => {
                    let member = r.membership.map_or(f64::INFINITY, |m| m.worst());
                    let drift = r.conserved.map_or(f64::INFINITY, |c| c.max_deviation);
                    Case::within(member.max(drift), 1e-8)
                }
                Ok(_) => Case::fail(f64::INFINITY),
                Err(QsoError::NoConvergence { residual, .. }) => Case::fail(residual),
                Err(_) => Case::fail(f64::INFINITY),
            }
        }),
        "periodic-orbit" => sweep(name, 1e-8, n, opts, |rng| {
            let spec = random_spec(rng, &case_iii);
            let x0 = random_interior_point(spec.m(), rng);
            let s = composite_order(spec.decomposition());
            match detect_periodic_orbit(&spec, &x0, s, DEFAULT_BURN_IN, DEFAULT_TOL) {
                Ok(Some(orbit)) => {
                    let dev = orbit
                        .points
                        .iter()
                        .map(|p| (p.last() - 0.5).abs())
                        .fold(0.0, f64::max);
                    let c = Case::within(dev, 1e-8);
                    Case { ok: c.ok && s.is_multiple_of(orbit.period), ..c }
                }
                _ => Case::fail(f64::INFINITY),
            }
        }),
        "boundary-to-vertex" => sweep(name, 0.0, n, opts, |rng| {
            let spec = random_spec(rng, &any);
            let x0 = random_boundary_point(spec.m(), rng);
            let y = apply(&spec, &x0).expect("dims agree");
            let e = SimplexPoint::vertex(spec.m(), spec.m()).expect("m >= 2");
            let c = Case::within(l1(y.coords(), e.coords()), 0.0);
            Case { ok: c.ok && y == e, ..c }
        }),
        "lyapunov" => sweep(name, 1e-12, n, opts, |rng| {
            let spec = random_spec(rng, &any);
            let x0 = random_interior_point(spec.m(), rng);
            let mut worst: f64 = 0.0;
            let mut ok = true;
            for kind in lyapunov_kinds(&spec) {
                let r = check_lyapunov(&spec, &x0, 200, kind).expect("kind valid for spec");
                worst = worst.max(-r.min_increment);
                ok &= r.min_increment >= -1e-12;
                if let Some(e) = r.max_identity_error {
                    ok &= e <= 1e-14;
                }
            }
            Case { residual: worst.max(0.0), ok }
        }),
        "invariant-sets" => sweep(name, 1e-10, n, opts, |rng| {
            let spec = random_spec(rng, &SpecSampler { m_min: 3, ..any.clone() });
            let seed: u64 = rng.random();
            let worst = invariant_descriptors(&spec, rng)
                .iter()
                .map(|d| {
                    check_invariant_set(&spec, d, 20, 100, seed)
                        .map_or(f64::INFINITY, |r| r.max_violation)
                })
                .fold(0.0, f64::max);
            Case::within(worst, 1e-10)
        }),
        "ergodic" => sweep(name, ERGODIC_TOL, n, opts, |rng| {
            let spec = random_spec(rng, &case_iii);
            let x0 = random_interior_point(spec.m(), rng);
            match ergodic_case(&spec, &x0, ERGODIC_N) {
                Ok((err, deltas)) => {
                    let c = Case::within(err, ERGODIC_TOL);
                    let shrinking = deltas.last() < deltas.first() && deltas[deltas.len() - 1] <= ERGODIC_TOL;
                    Case { ok: c.ok && shrinking, ..c }
                }
                Err(_) => Case::fail(f64::INFINITY),
            }
        }),
        "permutation-order" => sweep(name, 0.0, n, opts, |rng| {
            let len = rng.random_range(1..=8);
            let p = random_permutation(len, rng, false);
            let d = decompose(&p);
            let s = composite_order(&d);
            let brute = (1..).find(|&k| p.pow(k).is_identity()).expect("finite order");
            let ok = s == brute && d.to_permutation() == p && p.pow(s) == Permutation::identity(len);
            Case { residual: s.abs_diff(brute) as f64, ok }
        }),
        "trajectory-replay" => sweep(name, 1e-12, n, opts, |rng| {
            let spec = random_spec(rng, &any);
            let x0 = random_interior_point(spec.m(), rng);
            Case::within(replay_through_csv(&spec, &x0, 100).unwrap_or(f64::INFINITY), 1e-12)
        }),
        other => {
            return Err(QsoError::InvalidArgument(format!("unknown property {other:?}")));
        }
    };
    Ok(out)
}

/// Breaks symmetry and normalization at `(1, 2, 1)`.
pub fn corrupt(t: &mut QsoTensor) {
    let v = t.get(1, 2, 1);
    t.set(1, 2, 1, v + 0.1);
}

/// Largest entrywise gap between [`jacobian`] and central differences of
/// the ambient map with step `h`.
pub fn jacobian_fd_error(spec: &OperatorSpec, x: &SimplexPoint, h: f64) -> f64 {
    let m = spec.m();
    let jac = jacobian(spec, x).expect("dims agree");
    let mut worst: f64 = 0.0;
    for j in 0..m {
        let mut xp = x.coords().to_vec();
        let mut xn = xp.clone();
        xp[j] += h;
        xn[j] -= h;
        let fp = ambient_map(spec, &xp).expect("dims agree");
        let fm = ambient_map(spec, &xn).expect("dims agree");
        for k in 0..m {
            worst = worst.max(((fp[k] - fm[k]) / (2.0 * h) - jac[k][j]).abs());
        }
    }
    worst
}

/// Moves `x_m` of a point of `X` to `1/2 ± δ`, `δ ∈ [0.01, 0.1]`, rescaling
/// the other coordinates to stay on the simplex.
pub fn perturb_off_x<R: Rng + ?Sized>(r: &SimplexPoint, rng: &mut R) -> SimplexPoint {
    let m = r.dim();
    let delta: f64 = rng.random_range(0.01..=0.1) * if rng.random::<bool>() { 1.0 } else { -1.0 };
    let xm = 0.5 + delta;
    let rest = 1.0 - r.last();
    let mut c: Vec<f64> = r.coords()[..m - 1].iter().map(|v| v * (1.0 - xm) / rest).collect();
    c.push(xm);
    SimplexPoint::new(c).expect("rescaled point")
}

/// One descriptor of each applicable kind for `spec`.
pub fn invariant_descriptors<R: Rng + ?Sized>(spec: &OperatorSpec, rng: &mut R) -> Vec<InvariantSet> {
    let d = spec.decomposition();
    let mut out = Vec::new();
    let fixed = d.fixed_points.as_slice();
    if !fixed.is_empty() {
        let beta: Vec<usize> = fixed.iter().copied().filter(|_| rng.random::<bool>()).collect();
        let beta = if beta.is_empty() { vec![fixed[0]] } else { beta };
        out.push(InvariantSet::GammaBeta {
            beta: IndexSet::from_indices(beta, spec.m() - 1).expect("fixed points are in range"),
        });
    }
    let q = d.num_cycles();
    if q >= 1 {
        let cycle = rng.random_range(1..=q);
        let mu = if d.cycles[cycle - 1].len() == spec.m() - 1 {
            0.5
        } else {
            rng.random_range(0.0..=0.5)
        };
        out.push(InvariantSet::MMu { cycle, mu });
    }
    if q >= 2 {
        let i = rng.random_range(1..=q);
        let j = (i % q) + 1;
        out.push(InvariantSet::MNu {
            i,
            j,
            nu: rng.random_range(0.1..10.0),
        });
    }
    out
}

/// `‖A_N - orbit mean‖₁` for an `α = 0` orbit, together with the tail deltas
/// along the doubling schedule.
pub fn ergodic_case(spec: &OperatorSpec, x0: &SimplexPoint, n: usize) -> Result<(f64, Vec<f64>)> {
    let report = omega_limit(spec, x0, DEFAULT_MAX_ITERS, DEFAULT_TOL)?;
    let mean = orbit_mean(&report.limit_points);
    let sched = cesaro_schedule(spec, x0, &doubling_schedule(n))?;
    let err = l1(sched.last().expect("non-empty schedule").average.coords(), &mean);
    Ok((err, sched.iter().map(|a| a.tail_delta).collect()))
}

pub fn orbit_mean(points: &[SimplexPoint]) -> Vec<f64> {
    let m = points[0].dim();
    let mut mean = vec![0.0; m];
    for p in points {
        for (a, v) in mean.iter_mut().zip(p.coords()) {
            *a += v;
        }
    }
    mean.iter_mut().for_each(|a| *a /= points.len() as f64);
    mean
}

/// Writes an orbit to CSV, reads it back and returns the worst of the
/// replay error `‖V(row n) - row n+1‖₁` and the row-sum defect.
fn replay_through_csv(spec: &OperatorSpec, x0: &SimplexPoint, n: usize) -> Result<f64> {
    let t = iterate(spec, x0, n)?;
    let mut w = TrajectoryWriter::new(Vec::new(), spec.m()).map_err(|e| QsoError::Parse(e.to_string()))?;
    for (k, p) in t.points.iter().enumerate() {
        w.row(k, p.coords()).map_err(|e| QsoError::Parse(e.to_string()))?;
    }
    let bytes = w.finish().map_err(|e| QsoError::Parse(e.to_string()))?;
    let rows = read_trajectory(bytes.as_slice())?;
    let mut worst: f64 = 0.0;
    for pair in rows.windows(2) {
        let x = SimplexPoint::new(pair[0].1.clone())?;
        let y = apply(spec, &x)?;
        worst = worst.max(l1(y.coords(), &pair[1].1));
    }
    for (_, r) in &rows {
        worst = worst.max((r.iter().sum::<f64>() - 1.0).abs());
    }
    Ok(worst)
}
