//! Orthogonal hollowisation of a single matrix.
//!
//! A zero-trace matrix is brought to zero diagonal by at most `nu - 1` plane
//! rotations, where `nu` counts its nonzero diagonal entries. Each rotation
//! pairs the most positive with the most negative diagonal entry and turns a
//! neutral vector of the 2x2 symmetric submatrix into a basis vector, which
//! zeroes the positive entry and moves its mass onto the partner.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{max_abs_diagonal, DenseMatrix};
use crate::rotation::{Factor, GivensRotation, OrthogonalAccumulator};
use crate::EPS;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HollowReport {
    pub q: OrthogonalAccumulator,
    pub transformed: DenseMatrix,
    pub max_abs_diagonal: f64,
    pub rotations_used: usize,
}

/// Default relative tolerance `1e2 * n * eps`.
pub fn default_tol(n: usize) -> f64 {
    1e2 * n.max(1) as f64 * EPS
}

/// Unit `v` with `v^T S v = 0` for a symmetric 2x2 `S` with `s11 * s22 <= 0`.
///
/// Returns `e1` when `s11` vanishes, otherwise the normalisation of `(x, 1)`
/// where `x` is the root `-p + sqrt(p^2 - q)` of `x^2 + 2 p x + q` with
/// `p = s12 / s11`, `q = s22 / s11`.
pub fn neutral_vector_2x2(s: &DenseMatrix) -> Result<[f64; 2]> {
    if s.rows() != 2 || s.cols() != 2 {
        return Err(Error::DimensionMismatch("neutral_vector_2x2 needs a 2x2 matrix".into()));
    }
    neutral_vector_sym2(s[(0, 0)], s.sym(0, 1), s[(1, 1)])
}

pub(crate) fn neutral_vector_sym2(s11: f64, s12: f64, s22: f64) -> Result<[f64; 2]> {
    let scale = (s11 * s11 + 2.0 * s12 * s12 + s22 * s22).sqrt();
    let tiny = EPS * scale;
    if s11.abs() <= tiny || scale == 0.0 {
        return Ok([1.0, 0.0]);
    }
    if s11 * s22 > 0.0 && s22.abs() > tiny {
        return Err(Error::Precondition(format!(
            "diagonal entries {s11} and {s22} share a sign; no neutral vector of the form (x, 1)"
        )));
    }
    let p = s12 / s11;
    let q = (s22 / s11).min(0.0);
    let disc = (p * p - q).sqrt();
    let x = if p > 0.0 { -q / (p + disc) } else { disc - p };
    let r = x.hypot(1.0);
    Ok([x / r, 1.0 / r])
}

/// Hollowises a zero-trace square matrix. `tol` is relative to `||A||_F`: it
/// bounds the admissible trace and decides which diagonal entries count as
/// zero.
pub fn hollowise(a: &DenseMatrix, tol: f64) -> Result<HollowReport> {
    let n = a.square_dim()?;
    a.check_finite()?;
    let norm = a.frobenius_norm();
    if a.trace().abs() > tol * norm {
        return Err(Error::Precondition(format!(
            "trace {} exceeds tolerance {}",
            a.trace(),
            tol * norm
        )));
    }
    let mut transformed = a.clone();
    let mut q = OrthogonalAccumulator::new(n);
    let rotations_used = hollowise_in_place(&mut transformed, &mut q, &mut [], 0..n, tol * norm);
    Ok(HollowReport {
        max_abs_diagonal: max_abs_diagonal(&transformed),
        q,
        transformed,
        rotations_used,
    })
}

/// Zeroes the diagonal of `a` on the index range `active`, recording the
/// rotations in `q` and applying them to `others` as well. Entries with
/// `|a_ii| <= threshold` count as zero. Returns the number of rotations.
pub(crate) fn hollowise_in_place(
    a: &mut DenseMatrix,
    q: &mut OrthogonalAccumulator,
    others: &mut [&mut DenseMatrix],
    active: std::ops::Range<usize>,
    threshold: f64,
) -> usize {
    let mut rotations = 0;
    // Every rotation removes at least one entry from the nonzero set, so the
    // loop ends after at most len - 1 passes; the cap guards against rounding
    // ping-pong.
    for _ in 0..active.len() {
        let mut hi = (f64::NEG_INFINITY, usize::MAX);
        let mut lo = (f64::INFINITY, usize::MAX);
        for i in active.clone() {
            let d = a[(i, i)];
            if d > hi.0 {
                hi = (d, i);
            }
            if d < lo.0 {
                lo = (d, i);
            }
        }
        if hi.0 <= threshold || lo.0 >= -threshold {
            break;
        }
        let (p, qi) = (hi.1, lo.1);
        let v = neutral_vector_sym2(a[(p, p)], a.sym(p, qi), a[(qi, qi)])
            .expect("opposite-sign diagonal pair");
        let g = GivensRotation::with_column(p, qi, v[0], v[1]);
        let mut targets: Vec<&mut DenseMatrix> = Vec::with_capacity(others.len() + 1);
        targets.push(&mut *a);
        for o in others.iter_mut() {
            targets.push(&mut **o);
        }
        q.push(Factor::Givens(g), &mut targets);
        rotations += 1;
    }
    rotations
}

/// Orthogonal similarity to constant diagonal `tr(A)/n`.
pub fn constant_diagonalise(a: &DenseMatrix) -> Result<HollowReport> {
    let n = a.square_dim()?;
    a.check_finite()?;
    let mean = a.trace() / n as f64;
    let shifted = a.shift_diagonal(-mean);
    let tol = default_tol(n);
    // The shift can leave a trace residual of a few ulps of |mean|.
    let scale = shifted.frobenius_norm().max(mean.abs());
    let mut transformed = shifted;
    let mut q = OrthogonalAccumulator::new(n);
    let rotations_used = hollowise_in_place(&mut transformed, &mut q, &mut [], 0..n, tol * scale);
    let transformed = transformed.shift_diagonal(mean);
    Ok(HollowReport {
        max_abs_diagonal: max_abs_diagonal(&transformed),
        q,
        transformed,
        rotations_used,
    })
}
