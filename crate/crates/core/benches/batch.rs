//! Sequential vs rayon fan-out over independent (spec, x0) instances.
//!
//! `cargo bench -p qso-core`; with `--no-default-features` only the
//! sequential variants run.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qso_core::batch;
use qso_core::dynamics::{cesaro_average, omega_limit};
use qso_core::instances::{instance_seed, random_interior_point, random_spec, AlphaChoice, SpecSampler};
use qso_core::{OperatorSpec, SimplexPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn instances(n: usize, alpha: AlphaChoice) -> Vec<(OperatorSpec, SimplexPoint)> {
    let sampler = SpecSampler {
        m_min: 3,
        m_max: 16,
        alpha,
        non_identity: true,
    };
    (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(1, i));
            let spec = random_spec(&mut rng, &sampler);
            let x0 = random_interior_point(spec.m(), &mut rng);
            (spec, x0)
        })
        .collect()
}

fn omega(c: &mut Criterion) {
    let items = instances(256, AlphaChoice::Grid(vec![0.1, 0.5, 0.9]));
    let run = |(spec, x0): &(OperatorSpec, SimplexPoint)| omega_limit(spec, x0, 100_000, 1e-10).map(|r| r.iterations_used);
    let mut g = c.benchmark_group("omega_limit");
    g.bench_function(BenchmarkId::new("sequential", items.len()), |b| {
        b.iter(|| black_box(batch::map_sequential(&items, run)))
    });
    #[cfg(feature = "parallel")]
    g.bench_function(BenchmarkId::new("parallel", items.len()), |b| {
        b.iter(|| black_box(batch::map_parallel(&items, run)))
    });
    g.finish();
}

fn cesaro(c: &mut Criterion) {
    let items = instances(64, AlphaChoice::Fixed(0.0));
    let run = |(spec, x0): &(OperatorSpec, SimplexPoint)| cesaro_average(spec, x0, 20_000).map(|a| a.tail_delta);
    let mut g = c.benchmark_group("cesaro_20k");
    g.sample_size(20);
    g.bench_function(BenchmarkId::new("sequential", items.len()), |b| {
        b.iter(|| black_box(batch::map_sequential(&items, run)))
    });
    #[cfg(feature = "parallel")]
    g.bench_function(BenchmarkId::new("parallel", items.len()), |b| {
        b.iter(|| black_box(batch::map_parallel(&items, run)))
    });
    g.finish();
}

criterion_group!(benches, omega, cesaro);
criterion_main!(benches);
