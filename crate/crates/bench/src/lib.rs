//! Seeded inputs shared by the benchmarks.

use hollowise::matrix::DenseMatrix;
use hollowise::random;

/// Two random zero-trace `n x n` matrices.
pub fn pair_inputs(n: usize, seed: u64) -> (DenseMatrix, DenseMatrix) {
    let mut rng = random::rng(seed);
    (random::zero_trace(n, &mut rng), random::zero_trace(n, &mut rng))
}

/// A random Gaussian `n x n` matrix (`n` even for the symplectic routine).
pub fn dense_input(n: usize, seed: u64) -> DenseMatrix {
    random::gaussian(n, n, &mut random::rng(seed))
}
