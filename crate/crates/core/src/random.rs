//! Seeded random test matrices.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::DenseMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries i.i.d. standard normal.
pub fn gaussian<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Gaussian matrix with its mean diagonal removed, so `tr A = 0` up to rounding.
pub fn zero_trace<R: Rng>(n: usize, rng: &mut R) -> DenseMatrix {
    let a = gaussian(n, n, rng);
    let mean = a.trace() / n as f64;
    a.shift_diagonal(-mean)
}

pub fn symmetric<R: Rng>(n: usize, rng: &mut R) -> DenseMatrix {
    gaussian(n, n, rng).symmetric_part()
}

pub fn unit_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= r);
    v
}
