//! Shared fixtures for the criterion benchmarks.

use permusmooth::{DataMatrix, FeatureWeights, PermutationVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform data in `[-1, 1)`, a random ordering and uniform weights.
pub struct Fixture {
    pub data: DataMatrix,
    pub sigma: PermutationVector,
    pub weights: FeatureWeights,
}

impl Fixture {
    pub fn new(rows: usize, dims: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..rows * dims).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self {
            data: DataMatrix::from_shape_vec(rows, dims, values).expect("valid shape"),
            sigma: PermutationVector::random(rows, &mut rng),
            weights: FeatureWeights::uniform(dims),
        }
    }
}
