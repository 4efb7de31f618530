//! Fixed inputs shared by the benchmarks.

use plt_core::{make_state, rho_to_a, DensityMatrix, MinkowskiMap, StateRecipe};

/// Seeded random mixed states and their tensors.
pub fn random_tensors(n: usize, seed: u64) -> Vec<(DensityMatrix, MinkowskiMap)> {
    (0..n as u64)
        .map(|i| {
            let rho = make_state(&StateRecipe::RandomMixed { seed: seed.wrapping_add(i), rank: 4 })
                .expect("random state");
            let a = rho_to_a(&rho);
            (rho, a)
        })
        .collect()
}
