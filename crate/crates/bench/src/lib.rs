//! Inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sharbly::IntMatrix;

/// A seeded random sparse integer matrix with entries in `-3..=3`.
pub fn sparse_matrix(rows: usize, cols: usize, density: f64, seed: u64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dense: Vec<Vec<i64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| if rng.gen_bool(density) { rng.gen_range(-3..=3) } else { 0 })
                .collect()
        })
        .collect();
    IntMatrix::from_dense(&dense)
}
