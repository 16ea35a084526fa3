//! Acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p qso-dyn --test acceptance`. Every criterion is
//! checked at its stated tolerance. A criterion listed in `KNOWN_UNATTAINABLE`
//! still runs and still prints FAIL when it fails; it just does not make the
//! process exit nonzero. Any other failure does.

use std::process::Command;
use std::time::{Duration, Instant};

use qso_core::batch;
use qso_core::dynamics::{
    cesaro_schedule, check_invariant_set, check_lyapunov, detect_periodic_orbit, doubling_schedule,
    lyapunov_kinds, omega_limit, InvariantSet, OmegaCase, DEFAULT_BURN_IN,
};
use qso_core::eigen::{eigenvalues, max_matching_distance};
use qso_core::instances::{
    instance_seed, random_boundary_point, random_interior_point, random_spec, AlphaChoice,
    SpecSampler,
};
use qso_core::operator::{
    analytic_vertex_eigenvalues, fixed_point_residual, iterate_fixed_points, x_membership,
};
use qso_core::verify::{invariant_descriptors, jacobian_fd_error, orbit_mean, perturb_off_x};
use qso_core::{
    apply, apply_tensor, composite_order, fixed_points, jacobian, scalar_f, scalar_f_iterate,
    to_tensor, validate_tensor, OperatorSpec, SimplexPoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criterion 9 asks for `‖A_N - orbit mean‖₁ <= 1e-6` at `N = 10^5` for
/// every `α = 0` instance. The last coordinate alone rules that out for
/// generic starts: `(A_N)_m - 1/2 = (1/N) Σ_{k<N} (x_m^{(k)} - 1/2)`, and the
/// sum converges (superattracting fixed point of `f`) to a nonzero constant
/// that depends only on `x_m^{(0)}`. Since both points sum to one, the l1
/// error is at least twice that, i.e. a few `1e-6` for typical `x_m^{(0)}`.
const KNOWN_UNATTAINABLE: &[u32] = &[9];

struct Verdict {
    passed: bool,
    detail: String,
}

fn rng_for(base: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(instance_seed(base, i))
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn within_time(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn case_ii_instances() -> Vec<(OperatorSpec, SimplexPoint)> {
    let sampler = SpecSampler {
        m_min: 3,
        m_max: 8,
        alpha: AlphaChoice::Grid((1..=9).map(|k| k as f64 / 10.0).collect()),
        non_identity: true,
    };
    (0..50)
        .map(|i| {
            let mut rng = rng_for(4, i);
            let spec = random_spec(&mut rng, &sampler);
            let x0 = loop {
                let x = random_interior_point(spec.m(), &mut rng);
                if x_membership(&spec, &x).worst() > 1e-3 {
                    break x;
                }
            };
            (spec, x0)
        })
        .collect()
}

fn case_iii_instances() -> Vec<(OperatorSpec, SimplexPoint)> {
    let sampler = SpecSampler {
        m_min: 3,
        m_max: 8,
        alpha: AlphaChoice::Fixed(0.0),
        non_identity: true,
    };
    (0..50)
        .map(|i| {
            let mut rng = rng_for(5, i);
            let spec = random_spec(&mut rng, &sampler);
            let x0 = random_interior_point(spec.m(), &mut rng);
            (spec, x0)
        })
        .collect()
}

/// The point of `X` reached from `x0`: every block sum (cycle support or
/// fixed coordinate) is multiplied by the same factor each step, so each
/// block keeps its share of `Σ_{k<m} x_k`, which tends to `1/2`, and the
/// coordinates inside a cycle equalize.
fn predicted_limit(spec: &OperatorSpec, x0: &[f64]) -> Vec<f64> {
    let m = spec.m();
    let d = spec.decomposition();
    let total: f64 = x0[..m - 1].iter().sum();
    let mut b = vec![0.0; m];
    for c in &d.cycles {
        let share: f64 = c.iter().map(|&k| x0[k - 1]).sum::<f64>() / total;
        for &k in c {
            b[k - 1] = 0.5 * share / c.len() as f64;
        }
    }
    for k in d.fixed_points.iter() {
        b[k - 1] = 0.5 * x0[k - 1] / total;
    }
    b[m - 1] = 0.5;
    b
}

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let ends = scalar_f(0.0).unwrap() == 1.0 && scalar_f(1.0).unwrap() == 1.0;
    let worst_iter = (1..=1000)
        .map(|i| (scalar_f_iterate(i as f64 / 1001.0, 50).unwrap() - 0.5).abs())
        .fold(0.0, f64::max);
    let mut roots_ok = true;
    let mut worst_root: f64 = 0.0;
    for n in 1..=6 {
        let roots = iterate_fixed_points(n, 100_000, 1e-12);
        let dist = |r: f64| (r - 0.5).abs().min((r - 1.0).abs());
        worst_root = roots.iter().map(|&r| dist(r)).fold(worst_root, f64::max);
        roots_ok &= roots.iter().any(|&r| (r - 0.5).abs() <= 1e-9)
            && roots.iter().any(|&r| (r - 1.0).abs() <= 1e-9);
    }
    let el = t.elapsed();
    Verdict {
        passed: ends && worst_iter <= 1e-12 && roots_ok && worst_root <= 1e-9 && within_time(el, 1.0),
        detail: format!(
            "scalar map: f(0)=f(1)=1 {ends}; max |f^50(x)-1/2| = {worst_iter:.2e} (<= 1e-12); \
             roots of f^n(x)=x, n<=6, max distance to {{1/2,1}} = {worst_root:.2e} (<= 1e-9); {:.3} s (< 1 s)",
            el.as_secs_f64()
        ),
    }
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let sampler = SpecSampler::default();
    let per_spec = batch::map_range(200, |i| {
        let mut rng = rng_for(2, i);
        let spec = random_spec(&mut rng, &sampler);
        let tensor = to_tensor(&spec);
        let valid = validate_tensor(&tensor).is_empty();
        let worst = (0..10)
            .map(|_| {
                let x = SimplexPoint::random(spec.m(), &mut rng).unwrap();
                l1(apply(&spec, &x).unwrap().coords(), apply_tensor(&tensor, &x).unwrap().coords())
            })
            .fold(0.0, f64::max);
        (worst, valid)
    });
    let el = t.elapsed();
    let worst = per_spec.iter().map(|r| r.0).fold(0.0, f64::max);
    let invalid = per_spec.iter().filter(|r| !r.1).count();
    Verdict {
        passed: worst <= 1e-12 && invalid == 0 && within_time(el, 1.0),
        detail: format!(
            "tensor equivalence: max l1 gap {worst:.2e} over 200 specs x 10 points (<= 1e-12); \
             {invalid} invalid tensors; {:.3} s (< 1 s)",
            el.as_secs_f64()
        ),
    }
}

fn criterion_3() -> Verdict {
    let t = Instant::now();
    let sampler = SpecSampler::default();
    let per_spec = batch::map_range(100, |i| {
        let mut rng = rng_for(3, i);
        let spec = random_spec(&mut rng, &sampler);
        let set = fixed_points(&spec, 10, rng.random());
        let on = set
            .representatives
            .iter()
            .chain([&set.vertex])
            .map(|p| fixed_point_residual(&spec, p).unwrap())
            .fold(0.0, f64::max);
        let off = perturb_off_x(&set.representatives[0], &mut rng);
        (on, fixed_point_residual(&spec, &off).unwrap())
    });
    let el = t.elapsed();
    let worst_on = per_spec.iter().map(|r| r.0).fold(0.0, f64::max);
    let least_off = per_spec.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Verdict {
        passed: worst_on <= 1e-12 && least_off >= 1e-6 && within_time(el, 1.0),
        detail: format!(
            "fixed points: max residual on X and e_m {worst_on:.2e} (<= 1e-12); \
             min residual of 100 off-X perturbations {least_off:.2e} (>= 1e-6); {:.3} s (< 1 s)",
            el.as_secs_f64()
        ),
    }
}

fn criterion_4() -> Verdict {
    let t = Instant::now();
    let instances = case_ii_instances();
    let results = batch::map(&instances, |(spec, x0)| {
        let r = omega_limit(spec, x0, 100_000, 1e-10).ok()?;
        if r.case != OmegaCase::InteriorToX {
            return None;
        }
        let b = &r.limit_points[0];
        let member = x_membership(spec, b);
        let predicted = predicted_limit(spec, x0.coords());
        let conserved = b
            .coords()
            .iter()
            .zip(&predicted)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        Some((member.last_deviation, member.max_cycle_spread, conserved, r.iterations_used))
    });
    let el = t.elapsed();
    let failed = results.iter().filter(|r| r.is_none()).count();
    let ok: Vec<_> = results.iter().flatten().collect();
    let dev = ok.iter().map(|r| r.0).fold(0.0, f64::max);
    let spread = ok.iter().map(|r| r.1).fold(0.0, f64::max);
    let cons = ok.iter().map(|r| r.2).fold(0.0, f64::max);
    let iters = ok.iter().map(|r| r.3).max().unwrap_or(0);
    Verdict {
        passed: failed == 0 && dev <= 1e-8 && spread <= 1e-8 && cons <= 1e-8 && within_time(el, 10.0),
        detail: format!(
            "omega limit in X (0<α<1): {failed}/50 not converged; max |b_m-1/2| {dev:.2e}, \
             max cycle spread {spread:.2e}, max gap to block-share prediction {cons:.2e} (all <= 1e-8); \
             max iterations {iters}; {:.3} s (< 10 s)",
            el.as_secs_f64()
        ),
    }
}

fn criterion_5() -> Verdict {
    let t = Instant::now();
    let instances = case_iii_instances();
    let results = batch::map(&instances, |(spec, x0)| {
        let s = composite_order(spec.decomposition());
        let orbit = detect_periodic_orbit(spec, x0, s, DEFAULT_BURN_IN, 1e-10).ok()??;
        let dev = orbit.points.iter().map(|p| (p.last() - 0.5).abs()).fold(0.0, f64::max);
        Some((s.is_multiple_of(orbit.period), dev))
    });
    let el = t.elapsed();
    let missing = results.iter().filter(|r| r.is_none()).count();
    let not_dividing = results.iter().flatten().filter(|r| !r.0).count();
    let dev = results.iter().flatten().map(|r| r.1).fold(0.0, f64::max);
    Verdict {
        passed: missing == 0 && not_dividing == 0 && dev <= 1e-8 && within_time(el, 10.0),
        detail: format!(
            "periodic orbits (α=0): {missing}/50 without a period, {not_dividing} periods not dividing s; \
             max |x_m-1/2| on orbits {dev:.2e} (<= 1e-8); {:.3} s (< 10 s)",
            el.as_secs_f64()
        ),
    }
}

fn criterion_6() -> Verdict {
    let sampler = SpecSampler::default();
    let misses = batch::map_range(100, |i| {
        let mut rng = rng_for(6, i);
        let spec = random_spec(&mut rng, &sampler);
        let x0 = random_boundary_point(spec.m(), &mut rng);
        let e = SimplexPoint::vertex(spec.m(), spec.m()).unwrap();
        let r = omega_limit(&spec, &x0, 1, 1e-10).unwrap();
        apply(&spec, &x0).unwrap() != e || r.case != OmegaCase::BoundaryToVertex
    })
    .into_iter()
    .filter(|&miss| miss)
    .count();
    Verdict {
        passed: misses == 0,
        detail: format!("boundary to vertex: {misses}/100 boundary points not mapped exactly onto e_m in one step"),
    }
}

fn criterion_7() -> Verdict {
    let sampler = SpecSampler::default();
    let results = batch::map_range(50, |i| {
        let mut rng = rng_for(7, i);
        let spec = random_spec(&mut rng, &sampler);
        let x0 = random_interior_point(spec.m(), &mut rng);
        let mut min_inc = f64::INFINITY;
        let mut id_err: f64 = 0.0;
        for kind in lyapunov_kinds(&spec) {
            let r = check_lyapunov(&spec, &x0, 1000, kind).unwrap();
            min_inc = min_inc.min(r.min_increment);
            id_err = id_err.max(r.max_identity_error.unwrap_or(0.0));
        }
        (min_inc, id_err)
    });
    let min_inc = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let id_err = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Verdict {
        passed: min_inc >= -1e-12 && id_err <= 1e-14,
        detail: format!(
            "Lyapunov functions: min increment from step 1 on {min_inc:.2e} (>= -1e-12); \
             max |phi(Vx) - 2 x_m phi(x)| {id_err:.2e} (<= 1e-14)"
        ),
    }
}

fn criterion_8() -> Verdict {
    // specs with fixed points and at least two cycles, so all three sets apply
    let sampler = SpecSampler {
        m_min: 7,
        m_max: 10,
        ..SpecSampler::default()
    };
    let results = batch::map_range(10, |i| {
        let mut rng = rng_for(8, i);
        let spec = loop {
            let s = random_spec(&mut rng, &sampler);
            let d = s.decomposition();
            if d.num_cycles() >= 2 && !d.fixed_points.is_empty() {
                break s;
            }
        };
        let descriptors = invariant_descriptors(&spec, &mut rng);
        descriptors
            .iter()
            .map(|d| {
                let r = check_invariant_set(&spec, d, 20, 100, rng.random()).unwrap();
                let kind = match d {
                    InvariantSet::GammaBeta { .. } => 0,
                    InvariantSet::MMu { .. } => 1,
                    InvariantSet::MNu { .. } => 2,
                };
                (kind, r.max_violation)
            })
            .collect::<Vec<_>>()
    });
    let mut worst = [0.0_f64; 3];
    let mut seen = [0usize; 3];
    for (kind, v) in results.into_iter().flatten() {
        worst[kind] = worst[kind].max(v);
        seen[kind] += 1;
    }
    Verdict {
        passed: worst.iter().all(|&w| w <= 1e-10) && seen.iter().all(|&s| s > 0),
        detail: format!(
            "invariant sets, 20 points x 100 steps: max violation Gamma_beta {:.2e}, M_mu {:.2e}, \
             M_nu {:.2e} (<= 1e-10) over {:?} sets",
            worst[0], worst[1], worst[2], seen
        ),
    }
}

fn criterion_9() -> Verdict {
    let n = 100_000;
    let sched = doubling_schedule(n);
    let periodic = case_iii_instances();
    let errors = batch::map(&periodic, |(spec, x0)| {
        let r = omega_limit(spec, x0, 100_000, 1e-10).unwrap();
        let mean = orbit_mean(&r.limit_points);
        let avgs = cesaro_schedule(spec, x0, &sched).unwrap();
        l1(avgs.last().unwrap().average.coords(), &mean)
    });
    let all: Vec<_> = case_ii_instances().into_iter().chain(periodic).collect();
    let monotone = batch::map(&all, |(spec, x0)| {
        let avgs = cesaro_schedule(spec, x0, &sched).unwrap();
        avgs.windows(2).all(|w| w[1].tail_delta < w[0].tail_delta)
    });
    let over = errors.iter().filter(|&&e| e > 1e-6).count();
    let worst = errors.iter().copied().fold(0.0, f64::max);
    let best = errors.iter().copied().fold(f64::INFINITY, f64::min);
    let non_monotone = monotone.iter().filter(|&&m| !m).count();
    Verdict {
        passed: over == 0 && non_monotone == 0,
        detail: format!(
            "ergodicity, N = 1e5: ||A_N - orbit mean||_1 > 1e-6 in {over}/50 α=0 instances \
             (range {best:.2e} .. {worst:.2e}); tail deltas not decreasing in {non_monotone}/100 instances"
        ),
    }
}

fn criterion_10() -> Verdict {
    let sampler = SpecSampler::default();
    let fd = batch::map_range(100, |i| {
        let mut rng = rng_for(10, i);
        let spec = random_spec(&mut rng, &sampler);
        let x = random_interior_point(spec.m(), &mut rng);
        jacobian_fd_error(&spec, &x, 1e-6)
    });
    let small = SpecSampler {
        m_max: 8,
        ..SpecSampler::default()
    };
    let eig = batch::map_range(100, |i| {
        let mut rng = rng_for(100, i);
        let spec = random_spec(&mut rng, &small);
        let e = SimplexPoint::vertex(spec.m(), spec.m()).unwrap();
        let numeric = eigenvalues(&jacobian(&spec, &e).unwrap()).unwrap();
        max_matching_distance(&numeric, &analytic_vertex_eigenvalues(&spec))
    });
    let fd = fd.into_iter().fold(0.0, f64::max);
    let eig = eig.into_iter().fold(0.0, f64::max);
    Verdict {
        passed: fd <= 1e-6 && eig <= 1e-8,
        detail: format!(
            "Jacobian: max entry gap to central differences {fd:.2e} at 100 points (<= 1e-6); \
             max gap analytic vs numeric eigenvalues at e_m {eig:.2e}, m <= 8 (<= 1e-8)"
        ),
    }
}

fn criterion_11() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_qso-dyn");
    let runs: &[&[&str]] = &[
        &["simulate", "--m", "5", "--perm", "(1 2 3)", "--alpha", "0.3", "--x0", "random", "--iters", "2000"],
        &["classify", "--m", "6", "--perm", "(1 2)(3 4 5)", "--alpha", "0", "--x0", "random", "--seed", "9"],
        &["fixpoints", "--m", "7", "--perm", "(1 2)(4 6)", "--alpha", "0.4", "--reps", "4", "--seed", "3"],
        &["ergodic", "--m", "4", "--perm", "(1 2 3)", "--alpha", "0", "--x0", "random", "--iters", "20000"],
        &["verify", "--instances", "4", "--seed", "11"],
    ];
    let mut differing = Vec::new();
    for args in runs {
        let a = Command::new(bin).args(*args).output().unwrap();
        let b = Command::new(bin).args(*args).output().unwrap();
        if a.stdout != b.stdout || a.status != b.status || a.stdout.is_empty() {
            differing.push(args[0]);
        }
    }
    Verdict {
        passed: differing.is_empty(),
        detail: format!(
            "determinism: {} commands run twice, differing outputs: {:?}",
            runs.len(),
            differing
        ),
    }
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let criteria: [(u32, fn() -> Verdict); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut unexpected = 0;
    for (id, check) in criteria {
        let v = check();
        let tag = if v.passed {
            "PASS"
        } else if KNOWN_UNATTAINABLE.contains(&id) {
            "FAIL (known)"
        } else {
            unexpected += 1;
            "FAIL"
        };
        println!("criterion {id:>2} {tag}: {}", v.detail);
    }
    if unexpected > 0 {
        eprintln!("{unexpected} acceptance criteria failed");
        std::process::exit(1);
    }
}
