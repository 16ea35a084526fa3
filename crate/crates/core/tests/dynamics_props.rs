use proptest::prelude::*;
use qso_core::dynamics::{cesaro_average, check_lyapunov, lyapunov_kinds, omega_limit, OmegaCase};
use qso_core::instances::{random_interior_point, random_spec, AlphaChoice, SpecSampler};
use qso_core::operator::x_membership;
use qso_core::{iterate, make_point, OperatorSpec, Permutation, SimplexPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Positive weights and a permutation, turned into a spec and interior point.
fn instance() -> impl Strategy<Value = (OperatorSpec, SimplexPoint)> {
    (3usize..=8)
        .prop_flat_map(|m| {
            (
                Just(m).prop_perturb(|m, mut rng| {
                    let mut images: Vec<usize> = (1..m).collect();
                    for i in (1..images.len()).rev() {
                        images.swap(i, rng.random_range(0..=i));
                    }
                    images
                }),
                0.0f64..=1.0,
                prop::collection::vec(0.01f64..1.0, m),
            )
        })
        .prop_map(|(images, alpha, w)| {
            let m = w.len();
            let pi = Permutation::from_images(images).unwrap();
            let total: f64 = w.iter().sum();
            let x: Vec<f64> = w.iter().map(|v| v / total).collect();
            (OperatorSpec::new(m, pi, alpha).unwrap(), make_point(&x).unwrap())
        })
}

/// The point of X an orbit converges to, from block shares of `x0`.
fn block_share_limit(spec: &OperatorSpec, x0: &[f64]) -> Vec<f64> {
    let m = spec.m();
    let d = spec.decomposition();
    let total: f64 = x0[..m - 1].iter().sum();
    let mut b = vec![0.0; m];
    for c in &d.cycles {
        let mass: f64 = c.iter().map(|&k| x0[k - 1]).sum();
        for &k in c {
            b[k - 1] = 0.5 * mass / total / c.len() as f64;
        }
    }
    for k in d.fixed_points.iter() {
        b[k - 1] = 0.5 * x0[k - 1] / total;
    }
    b[m - 1] = 0.5;
    b
}

proptest! {
    #[test]
    fn last_coordinate_follows_f((spec, x0) in instance()) {
        let t = iterate(&spec, &x0, 40).unwrap();
        for (n, w) in t.points.windows(2).enumerate() {
            let xm = w[0].last();
            prop_assert!((w[1].last() - (2.0 * xm * xm - 2.0 * xm + 1.0)).abs() <= 1e-15);
            if n >= 1 {
                prop_assert!(xm >= 0.5 - 1e-12);
            }
        }
        prop_assert!(t.replay_error() <= 1e-12);
    }

    #[test]
    fn lyapunov_functions_are_monotone((spec, x0) in instance()) {
        for kind in lyapunov_kinds(&spec) {
            let r = check_lyapunov(&spec, &x0, 100, kind).unwrap();
            prop_assert!(r.min_increment >= -1e-12, "{kind}: {}", r.min_increment);
            if let Some(e) = r.max_identity_error {
                prop_assert!(e <= 1e-14);
            }
        }
    }

    #[test]
    fn interior_orbits_reach_the_predicted_point_of_x(
        (spec, x0) in instance(),
        alpha in 0.05f64..0.95,
    ) {
        prop_assume!(!spec.pi().is_identity());
        let spec = spec.with_alpha(alpha).unwrap();
        let r = omega_limit(&spec, &x0, 100_000, 1e-10).unwrap();
        prop_assert_eq!(r.case, OmegaCase::InteriorToX);
        let b = &r.limit_points[0];
        prop_assert!(x_membership(&spec, b).worst() <= 1e-10);
        let want = block_share_limit(&spec, x0.coords());
        for (u, v) in b.coords().iter().zip(&want) {
            prop_assert!((u - v).abs() <= 1e-8, "{b} vs {want:?}");
        }
    }

    #[test]
    fn periodic_case_period_divides_s((spec, x0) in instance()) {
        prop_assume!(!spec.pi().is_identity());
        let spec = spec.with_alpha(0.0).unwrap();
        let r = omega_limit(&spec, &x0, 100_000, 1e-10).unwrap();
        let s = qso_core::composite_order(spec.decomposition());
        prop_assert_eq!(r.case, OmegaCase::PeriodicOrbit);
        prop_assert_eq!(s % r.period, 0);
        for p in &r.limit_points {
            prop_assert!((p.last() - 0.5).abs() <= 1e-10);
        }
    }

    #[test]
    fn cesaro_average_stays_on_simplex((spec, x0) in instance(), n in 1usize..500) {
        let a = cesaro_average(&spec, &x0, n).unwrap();
        prop_assert!((a.average.coords().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(a.average.coords().iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn identity_or_alpha_one_converges_without_mixing() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sampler = SpecSampler {
        alpha: AlphaChoice::Fixed(1.0),
        ..SpecSampler::default()
    };
    for _ in 0..30 {
        let spec = random_spec(&mut rng, &sampler);
        let x0 = random_interior_point(spec.m(), &mut rng);
        let r = omega_limit(&spec, &x0, 100_000, 1e-10).unwrap();
        assert_eq!(r.case, OmegaCase::IdentityInterior);
        // every coordinate below m keeps its share of the total
        let want = block_share_limit(&OperatorSpec::parse(spec.m(), "Id", 1.0).unwrap(), x0.coords());
        for (u, v) in r.limit_points[0].coords().iter().zip(&want) {
            assert!((u - v).abs() <= 1e-8);
        }
    }
}
