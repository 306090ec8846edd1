//! Shared fixtures for the criterion benches.

use unsharp_core::search::{random_density, random_povm};
use unsharp_core::{DensityMatrix, Povm};

pub fn bench_povm(n: usize, d: usize, seed: u64) -> Povm {
    let mut rng = unsharp_core::rng::seeded_rng(seed);
    random_povm(n, d, &mut rng).expect("bench POVM sampling is total")
}

pub fn bench_state(d: usize, seed: u64) -> DensityMatrix {
    let mut rng = unsharp_core::rng::seeded_rng(seed);
    random_density(d, &mut rng)
}
