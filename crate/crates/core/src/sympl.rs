//! Symplectic orthogonal reduction of a `2n x 2n` matrix to constant diagonal.
//!
//! Symplectic here refers to `J = [[0, I_n], [-I_n, 0]]`, so coordinate `k`
//! is paired with `k + n`. The reduction runs in three stages:
//!
//! 1. one plane rotation per pair `(k, k+n)` equalises the two diagonal halves;
//! 2. the two `n x n` diagonal blocks are reduced as a pair (first block hollow,
//!    second almost hollow) by `V`, lifted as `diag(V, V)`;
//! 3. the remaining 4x4 principal block at `(n-2, n-1, 2n-2, 2n-1)` is made
//!    hollow directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hollow::default_tol;
use crate::matrix::{diagonal_spread, DenseMatrix};
use crate::pairhollow::pair_hollowise;
use crate::rotation::{Factor, OrthogonalAccumulator};
use crate::EPS;

/// Elementary symplectic orthogonal factors. `half` is `n` for a `2n x 2n`
/// ambient space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SymplecticGenerator {
    /// Rotation `[[c, s], [-s, c]]` in the plane `(k, k + half)`.
    Gk { half: usize, k: usize, c: f64, s: f64 },
    /// The same rotation in the planes `(half-2, half-1)` and `(2 half-2, 2 half-1)`.
    CalG { half: usize, c: f64, s: f64 },
    /// Unit-quaternion 4x4 block on `(i, j, i + half, j + half)`.
    Quat { half: usize, i: usize, j: usize, p: [f64; 4] },
    /// `diag(V, V)` for an orthogonal `V`, kept as its factor list.
    BlockV { half: usize, v: OrthogonalAccumulator },
}

/// The 4x4 block of a `Quat` generator, row-major.
pub fn quat_block(p: &[f64; 4]) -> [f64; 16] {
    let [p0, p1, p2, p3] = *p;
    [
        p0, -p1, -p2, -p3, //
        p1, p0, -p3, p2, //
        p2, p3, p0, -p1, //
        p3, -p2, p1, p0,
    ]
}

impl SymplecticGenerator {
    pub fn half(&self) -> usize {
        match self {
            Self::Gk { half, .. } | Self::CalG { half, .. } | Self::Quat { half, .. } | Self::BlockV { half, .. } => {
                *half
            }
        }
    }

    /// Visits the embedded orthogonal blocks this generator is made of.
    pub fn for_each_block(&self, f: &mut dyn FnMut(&[usize], &[f64])) {
        match self {
            Self::Gk { half, k, c, s } => f(&[*k, k + half], &[*c, *s, -s, *c]),
            Self::CalG { half, c, s } => {
                let g = [*c, *s, -s, *c];
                f(&[half - 2, half - 1], &g);
                f(&[2 * half - 2, 2 * half - 1], &g);
            }
            Self::Quat { half, i, j, p } => f(&[*i, *j, i + half, j + half], &quat_block(p)),
            Self::BlockV { half, v } => {
                for factor in v.factors() {
                    factor.for_each_block(&mut |idx, g| {
                        f(idx, g);
                        let lifted: Vec<usize> = idx.iter().map(|i| i + half).collect();
                        f(&lifted, g);
                    });
                }
            }
        }
    }

    /// Checks the normalisation invariant of the generator's parameters.
    pub fn parameter_residual(&self) -> f64 {
        match self {
            Self::Gk { c, s, .. } | Self::CalG { c, s, .. } => (c * c + s * s - 1.0).abs(),
            Self::Quat { p, .. } => (p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs(),
            Self::BlockV { v, .. } => v.orthogonality_residual(),
        }
    }

    pub fn to_matrix(&self) -> DenseMatrix {
        Factor::Symplectic(self.clone()).to_matrix(2 * self.half())
    }
}

/// `||U^T J U - J||_F`.
pub fn symplectic_residual(u: &DenseMatrix) -> Result<f64> {
    let m = u.square_dim()?;
    if m % 2 != 0 {
        return Err(Error::Precondition(format!("odd dimension {m}")));
    }
    let n = m / 2;
    let ju = DenseMatrix::from_fn(m, m, |i, j| if i < n { u[(i + n, j)] } else { -u[(i - n, j)] });
    let utju = u.transpose().matmul(&ju)?;
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            let jij = if j == i + n {
                1.0
            } else if i == j + n {
                -1.0
            } else {
                0.0
            };
            acc += (utju[(i, j)] - jij).powi(2);
        }
    }
    Ok(acc.sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymplReport {
    pub u: OrthogonalAccumulator,
    pub transformed: DenseMatrix,
    pub diagonal_spread: f64,
}

fn even_half(a: &DenseMatrix) -> Result<usize> {
    let m = a.square_dim()?;
    if m % 2 != 0 || m == 0 {
        return Err(Error::Precondition(format!("dimension {m} is not a positive even number")));
    }
    Ok(m / 2)
}

/// Applies `G_k` on every pair `(k, k+n)` so that the symmetric part gets
/// `d_k = d_{k+n}`. Pairs that already agree (within `1e2 eps ||A||_F`) are
/// skipped.
pub fn equalize_halves(a: &DenseMatrix) -> Result<(DenseMatrix, Vec<SymplecticGenerator>)> {
    let n = even_half(a)?;
    a.check_finite()?;
    let mut out = a.clone();
    let mut acc = OrthogonalAccumulator::new(2 * n);
    let gens = equalize_in_place(&mut out, &mut acc, n, 1e2 * EPS * a.frobenius_norm());
    Ok((out, gens))
}

fn equalize_in_place(a: &mut DenseMatrix, acc: &mut OrthogonalAccumulator, n: usize, tol: f64) -> Vec<SymplecticGenerator> {
    let mut gens = Vec::new();
    for k in 0..n {
        let (alpha, beta, delta) = (a[(k, k)], a.sym(k, k + n), a[(k + n, k + n)]);
        if (alpha - delta).abs() <= tol {
            continue;
        }
        // d_k - d_{k+n} = cos(2 theta) (alpha - delta) - 2 sin(2 theta) beta
        let theta = 0.5 * (alpha - delta).atan2(2.0 * beta);
        let g = SymplecticGenerator::Gk {
            half: n,
            k,
            c: theta.cos(),
            s: theta.sin(),
        };
        acc.push(Factor::Symplectic(g.clone()), &mut [&mut *a]);
        gens.push(g);
    }
    gens
}

/// Which branch of the 4x4 construction picked the first factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuatCase {
    /// `a + h = e + j = 0`: no first factor needed.
    Identity,
    /// `b + i = d - f = 0`: all four parameters equal to 1/2.
    Balanced,
    /// Everything else, including `b + i = 0` or `d - f = 0` alone.
    General,
}

/// Parameters of the first 4x4 factor so that `S1^T A S1` has
/// `a11 = -a33` and `a22 = -a44`. Entries follow the layout
/// `[[a,b,c,d],[b,e,f,g],[c,f,h,i],[d,g,i,j]]`.
pub fn quat_parameters(a4: &DenseMatrix, zero: f64) -> (QuatCase, [f64; 4]) {
    let s = |i: usize, j: usize| a4.sym(i, j);
    let (a, b, d) = (s(0, 0), s(0, 1), s(0, 3));
    let (e, f) = (s(1, 1), s(1, 2));
    let (h, i) = (s(2, 2), s(2, 3));
    let j = s(3, 3);
    let (ah, ej) = (a + h, e + j);
    if ah.abs() <= zero && ej.abs() <= zero {
        return (QuatCase::Identity, [1.0, 0.0, 0.0, 0.0]);
    }
    if (b + i).abs() <= zero && (d - f).abs() <= zero {
        return (QuatCase::Balanced, [0.5; 4]);
    }
    // With p2 = p3 = 0 the condition is 0 = (p1^2 - p0^2)(e+j) + 2 p0 p1 (b+i),
    // i.e. t^2 - 2 r t - 1 = 0 for t = p0 / p1 and r = (b+i)/(e+j).
    // The trace condition makes e + j = -(a + h), nonzero here.
    let ej = if ej.abs() > zero { ej } else { -ah };
    let r = (b + i) / ej;
    let root = r.hypot(1.0);
    let t = if r >= 0.0 { r + root } else { r - root };
    let p1 = 1.0 / t.hypot(1.0);
    (QuatCase::General, [t * p1, p1, 0.0, 0.0])
}

/// `(q0, q2)` with `q0^2 a - 2 q0 q2 c - q2^2 a = 0`, the identity when `a = 0`.
fn half_rotation(a: f64, c: f64, zero: f64) -> (f64, f64) {
    if a.abs() <= zero {
        return (1.0, 0.0);
    }
    // t^2 + 2 r t - 1 = 0; the root with |t| <= 1.
    let r = c / a;
    let root = r.hypot(1.0);
    let t = if r >= 0.0 { 1.0 / (r + root) } else { -1.0 / (root - r) };
    let q0 = 1.0 / t.hypot(1.0);
    (q0, t * q0)
}

/// Generators making the symmetric part of `work` hollow on the
/// coordinates `(i, j, i+half, j+half)`. The 4x4 principal block must have
/// zero trace up to `zero`.
fn hollowise_4x4_in_place(
    work: &mut DenseMatrix,
    acc: &mut OrthogonalAccumulator,
    half: usize,
    i: usize,
    j: usize,
    zero: f64,
) -> QuatCase {
    let idx = [i, j, i + half, j + half];
    let a4 = work.principal(&idx);
    let (case, p) = quat_parameters(&a4, zero);
    if case != QuatCase::Identity {
        acc.push(Factor::Symplectic(SymplecticGenerator::Quat { half, i, j, p }), &mut [&mut *work]);
    }
    // Now a = -h and e = -j on the block; one rotation per pair finishes it.
    for (k, kk) in [(i, i + half), (j, j + half)] {
        let (q0, q2) = half_rotation(work[(k, k)], work.sym(k, kk), zero);
        if q2 != 0.0 {
            acc.push(
                Factor::Symplectic(SymplecticGenerator::Gk { half, k, c: q0, s: q2 }),
                &mut [&mut *work],
            );
        }
    }
    case
}

/// Symplectic orthogonal `S` with `S^T A4 S` hollow for a zero-trace
/// symmetric 4x4 `A4`.
pub fn sympl_hollowise_4x4(a4: &DenseMatrix) -> Result<SymplReport> {
    if a4.rows() != 4 || a4.cols() != 4 {
        return Err(Error::DimensionMismatch("sympl_hollowise_4x4 needs a 4x4 matrix".into()));
    }
    a4.check_finite()?;
    let norm = a4.frobenius_norm();
    let zero = 1e2 * EPS * norm;
    if a4.trace().abs() > 4.0 * zero {
        return Err(Error::Precondition(format!("trace {} is not zero", a4.trace())));
    }
    if a4.sub(&a4.transpose())?.frobenius_norm() > zero {
        return Err(Error::Precondition("matrix is not symmetric".into()));
    }
    let mut work = a4.clone();
    let mut acc = OrthogonalAccumulator::new(4);
    hollowise_4x4_in_place(&mut work, &mut acc, 2, 0, 1, zero);
    Ok(SymplReport {
        diagonal_spread: diagonal_spread(&work),
        u: acc,
        transformed: work,
    })
}

/// Symplectic orthogonal `U` with `U^T A U` of constant diagonal `tr(A)/2n`.
pub fn sympl_constant_diagonalise(a: &DenseMatrix) -> Result<SymplReport> {
    let n = even_half(a)?;
    a.check_finite()?;
    let mean = a.trace() / (2 * n) as f64;
    let mut work = a.shift_diagonal(-mean);
    let scale = work.frobenius_norm().max(mean.abs());
    let zero = 1e2 * EPS * scale;
    let mut acc = OrthogonalAccumulator::new(2 * n);

    equalize_in_place(&mut work, &mut acc, n, zero);

    if n >= 2 {
        let mut blocks = [work.block(0, 0, n, n).symmetric_part(), work.block(n, n, n, n).symmetric_part()];
        for b in blocks.iter_mut() {
            // Remove the rounding-level trace left by the shift.
            *b = b.shift_diagonal(-b.trace() / n as f64);
        }
        let pair = pair_hollowise(&blocks[0], &blocks[1], default_tol(n))?;
        if !pair.q.factors().is_empty() {
            acc.push(
                Factor::Symplectic(SymplecticGenerator::BlockV { half: n, v: pair.q }),
                &mut [&mut work],
            );
        }
        // The 4x4 block carries whatever trace the hollowed entries left
        // behind, which is below the thresholds used above.
        hollowise_4x4_in_place(&mut work, &mut acc, n, n - 2, n - 1, zero);
    }

    let transformed = work.shift_diagonal(mean);
    Ok(SymplReport {
        diagonal_spread: diagonal_spread(&transformed),
        u: acc,
        transformed,
    })
}
