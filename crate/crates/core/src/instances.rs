//! Seeded random operator specs and starting points for property sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::OperatorSpec;
use crate::permutation::Permutation;
use crate::simplex::{dirichlet_weights, SimplexPoint};

#[derive(Debug, Clone, PartialEq)]
pub enum AlphaChoice {
    /// Uniform on `[0, 1]`.
    Any,
    /// Uniform on `(0, 1)`.
    Interior,
    /// One of the listed values, uniformly.
    Grid(Vec<f64>),
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecSampler {
    pub m_min: usize,
    pub m_max: usize,
    pub alpha: AlphaChoice,
    /// Redraw until `π ≠ Id` (needs `m >= 3`).
    pub non_identity: bool,
}

impl Default for SpecSampler {
    fn default() -> Self {
        Self {
            m_min: 2,
            m_max: 10,
            alpha: AlphaChoice::Any,
            non_identity: false,
        }
    }
}

/// Uniform permutation of `{1, ..., n}`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R, non_identity: bool) -> Permutation {
    let mut images: Vec<usize> = (1..=n).collect();
    loop {
        images.shuffle(rng);
        let p = Permutation::from_images(images.clone()).expect("shuffle is a bijection");
        if !non_identity || n < 2 || !p.is_identity() {
            return p;
        }
    }
}

pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, s: &SpecSampler) -> OperatorSpec {
    let lo = if s.non_identity { s.m_min.max(3) } else { s.m_min.max(2) };
    let m = rng.random_range(lo..=s.m_max.max(lo));
    let pi = random_permutation(m - 1, rng, s.non_identity);
    let alpha = match &s.alpha {
        AlphaChoice::Any => rng.random_range(0.0..=1.0),
        AlphaChoice::Interior => loop {
            let a: f64 = rng.random();
            if a > 0.0 {
                break a;
            }
        },
        AlphaChoice::Grid(g) => g[rng.random_range(0..g.len())],
        AlphaChoice::Fixed(a) => *a,
    };
    OperatorSpec::new(m, pi, alpha).expect("sampled spec is valid")
}

/// Uniform draw from the open simplex.
pub fn random_interior_point<R: Rng + ?Sized>(m: usize, rng: &mut R) -> SimplexPoint {
    loop {
        let p = SimplexPoint::random(m, rng).expect("m >= 2");
        if p.is_interior(1e-12) {
            return p;
        }
    }
}

/// Uniform draw from the face `x_m = 0`.
pub fn random_boundary_point<R: Rng + ?Sized>(m: usize, rng: &mut R) -> SimplexPoint {
    let mut w = dirichlet_weights(m - 1, rng);
    w.push(0.0);
    SimplexPoint::new(w).expect("weights sum to one")
}

/// Uniform point of the closed simplex from a ChaCha8 stream seeded with `seed`.
pub fn seeded_point(m: usize, seed: u64) -> crate::error::Result<SimplexPoint> {
    SimplexPoint::random(m, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Per-instance seed so batches are reproducible regardless of scheduling.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
