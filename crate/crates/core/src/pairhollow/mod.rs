//! Simultaneous reduction of a zero-trace pair `(A, B)` to a hollow `A` and
//! an almost hollow `B`, and point realisation in the joint real numerical
//! range of two symmetric forms.
//!
//! The pair reduction works one leading index at a time. Once `A` is hollow,
//! the index `k` and the extreme diagonal entries `i2`, `i3` of `B` on the
//! trailing block form a 3x3 subproblem whose common neutral vector is
//! rotated onto `e_k` by a Householder reflection. Afterwards `A` has lost
//! hollowness only at `i2`, `i3`, which one Givens rotation repairs. Every
//! step costs `O(n)` per factor application, so the whole reduction is
//! `O(n^2)` plus the accumulation of `Q`.

mod jnr;
mod neutral3;

use serde::{Deserialize, Serialize};

pub use jnr::realize_jnr_point;
pub use neutral3::{common_neutral_vector_3, elimination_quartic, NeutralBranch, NeutralPair3};
pub(crate) use neutral3::neutral_vector_any3;

use crate::error::{Error, Result};
use crate::hollow::hollowise_in_place;
use crate::matrix::DenseMatrix;
use crate::rotation::{EmbeddedBlock, Factor, OrthogonalAccumulator};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairReport {
    pub q: OrthogonalAccumulator,
    pub a_out: DenseMatrix,
    pub b_out: DenseMatrix,
    pub quartics_solved: usize,
}

/// Householder reflection `H` (symmetric, row-major) with `H e1 = v` for a
/// unit `v` with `v[0] <= 0`.
fn householder_from_first_column(v: &[f64; 3]) -> Vec<f64> {
    let w = [1.0 - v[0], -v[1], -v[2]];
    let ww = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    let mut h = vec![0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            h[i * 3 + j] = if i == j { 1.0 } else { 0.0 } - 2.0 * w[i] * w[j] / ww;
        }
    }
    h
}

/// Orthogonal `Q` with `Q^T A Q` hollow and `Q^T B Q` almost hollow.
///
/// `tol` is relative: traces must satisfy `|tr A| <= tol ||A||_F` (same for
/// `B`), and diagonal entries of `B` below `tol ||B||_F` count as zero.
pub fn pair_hollowise(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> Result<PairReport> {
    let n = a.square_dim()?;
    if b.square_dim()? != n {
        return Err(Error::DimensionMismatch(format!(
            "pair of sizes {n} and {}",
            b.rows()
        )));
    }
    a.check_finite()?;
    b.check_finite()?;
    let (na, nb) = (a.frobenius_norm(), b.frobenius_norm());
    for (name, m, norm) in [("A", a, na), ("B", b, nb)] {
        if m.trace().abs() > tol * norm {
            return Err(Error::Precondition(format!(
                "trace of {name} is {} (tolerance {})",
                m.trace(),
                tol * norm
            )));
        }
    }

    let mut a_out = a.clone();
    let mut b_out = b.clone();
    let mut q = OrthogonalAccumulator::new(n);
    let thr_a = tol * na;
    let zero_b = tol * nb;
    hollowise_in_place(&mut a_out, &mut q, &mut [&mut b_out], 0..n, thr_a);

    let mut quartics_solved = 0;
    for k in 0..n.saturating_sub(2) {
        if b_out[(k, k)].abs() <= zero_b {
            continue;
        }
        let mut i2 = k + 1;
        for j in k + 2..n {
            if b_out[(j, j)] < b_out[(i2, i2)] {
                i2 = j;
            }
        }
        let mut i3 = usize::MAX;
        for j in k + 1..n {
            if j != i2 && (i3 == usize::MAX || b_out[(j, j)] > b_out[(i3, i3)]) {
                i3 = j;
            }
        }
        let idx = [k, i2, i3];
        let mut a3 = a_out.principal(&idx).symmetric_part();
        for i in 0..3 {
            // Entries below the hollowness threshold are zero by convention.
            a3[(i, i)] = 0.0;
        }
        let b3 = b_out.principal(&idx).symmetric_part();
        let np = neutral_vector_any3(&a3, &b3, zero_b)?;
        if np.branch == NeutralBranch::CNonzeroQuartic {
            quartics_solved += 1;
        }
        let mut v = np.v;
        if v[0] > 0.0 {
            v = [-v[0], -v[1], -v[2]];
        }
        let h = householder_from_first_column(&v);
        q.push(
            Factor::Block(EmbeddedBlock::new(idx.to_vec(), h)),
            &mut [&mut a_out, &mut b_out],
        );
        hollowise_in_place(&mut a_out, &mut q, &mut [&mut b_out], k + 1..n, thr_a);
    }

    Ok(PairReport {
        q,
        a_out,
        b_out,
        quartics_solved,
    })
}

/// Newton iteration on the unit sphere for `x^T A x = c1`, `x^T B x = c2`
/// with symmetric `A`, `B`. Keeps the best iterate; never makes things worse.
pub(crate) fn polish_forms(a: &DenseMatrix, b: &DenseMatrix, c: (f64, f64), x0: Vec<f64>) -> Vec<f64> {
    let n = x0.len();
    let residual = |x: &[f64]| -> (f64, f64, Vec<f64>, Vec<f64>) {
        let ax = a.matvec(x);
        let bx = b.matvec(x);
        let fa = dot(x, &ax) - c.0;
        let fb = dot(x, &bx) - c.1;
        (fa, fb, ax, bx)
    };
    let normalize = |mut x: Vec<f64>| {
        let r = dot(&x, &x).sqrt();
        x.iter_mut().for_each(|e| *e /= r);
        x
    };
    let mut x = normalize(x0);
    let (mut fa, mut fb, mut ax, mut bx) = residual(&x);
    for _ in 0..6 {
        let err = fa.hypot(fb);
        if err == 0.0 {
            break;
        }
        // Tangential gradients of the two forms.
        let (xa, xb) = (dot(&x, &ax), dot(&x, &bx));
        let g1: Vec<f64> = (0..n).map(|i| 2.0 * (ax[i] - xa * x[i])).collect();
        let g2: Vec<f64> = (0..n).map(|i| 2.0 * (bx[i] - xb * x[i])).collect();
        let (m11, m12, m22) = (dot(&g1, &g1), dot(&g1, &g2), dot(&g2, &g2));
        let det = m11 * m22 - m12 * m12;
        let step: Vec<f64> = if det > 1e-12 * m11 * m22 && det > 0.0 {
            let l1 = (m22 * fa - m12 * fb) / det;
            let l2 = (m11 * fb - m12 * fa) / det;
            (0..n).map(|i| -(l1 * g1[i] + l2 * g2[i])).collect()
        } else if m11 + m22 > 0.0 {
            // Gradients (nearly) parallel: least-squares step along their sum.
            let g: Vec<f64> = if m12 >= 0.0 {
                (0..n).map(|i| g1[i] + g2[i]).collect()
            } else {
                (0..n).map(|i| g1[i] - g2[i]).collect()
            };
            let gg = dot(&g, &g);
            let fg = if m12 >= 0.0 { fa + fb } else { fa - fb };
            (0..n).map(|i| -fg / gg * g[i]).collect()
        } else {
            break;
        };
        let cand = normalize((0..n).map(|i| x[i] + step[i]).collect());
        let (ca, cb, cax, cbx) = residual(&cand);
        if ca.hypot(cb) < err {
            x = cand;
            (fa, fb, ax, bx) = (ca, cb, cax, cbx);
        } else {
            break;
        }
    }
    x
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hollow::default_tol;
    use crate::matrix::{almost_hollow_residual, max_abs_diagonal};
    use crate::EPS;

    #[test]
    fn two_by_two_only_hollows_a() {
        let a = DenseMatrix::from_diagonal(&[1.0, -1.0]);
        let b = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let r = pair_hollowise(&a, &b, default_tol(2)).unwrap();
        assert!(max_abs_diagonal(&r.a_out) < 1e-15);
        assert!(r.b_out.trace().abs() < 1e-15);
        // The rotated B has diagonal (+-1, -+1): not hollow, and it cannot be.
        assert!(max_abs_diagonal(&r.b_out) > 0.5);
    }

    #[test]
    fn zero_pair() {
        let z = DenseMatrix::zeros(3, 3);
        let r = pair_hollowise(&z, &z, default_tol(3)).unwrap();
        assert_eq!(r.q.q(), &DenseMatrix::identity(3));
        assert_eq!(r.a_out, z);
        assert_eq!(r.b_out, z);
    }

    #[test]
    fn small_pair_definitions_hold() {
        let a = DenseMatrix::from_rows(&[
            [2.0, 1.0, 0.0, -1.0],
            [0.5, -1.0, 2.0, 0.0],
            [0.0, 1.0, 0.5, 1.0],
            [1.0, 0.0, -2.0, -1.5],
        ])
        .unwrap();
        let b = DenseMatrix::from_rows(&[
            [1.0, 0.0, 1.0, 0.0],
            [2.0, 3.0, 0.0, 1.0],
            [0.0, -1.0, -2.5, 0.0],
            [1.0, 1.0, 0.0, -1.5],
        ])
        .unwrap();
        let r = pair_hollowise(&a, &b, default_tol(4)).unwrap();
        let bound = 1e3 * 4.0 * EPS;
        assert!(max_abs_diagonal(&r.a_out) <= bound * a.frobenius_norm());
        assert!(almost_hollow_residual(&r.b_out) <= bound * b.frobenius_norm());
        assert!(r.quartics_solved <= 2);
        let qa = r.q.q().congruence(&a).unwrap();
        assert!(qa.sub(&r.a_out).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn trace_violation() {
        let a = DenseMatrix::identity(3);
        assert!(matches!(
            pair_hollowise(&a, &DenseMatrix::zeros(3, 3), 1e-12),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn householder_maps_e1() {
        let v = [-0.6, 0.0, 0.8];
        let h = householder_from_first_column(&v);
        for i in 0..3 {
            assert!((h[i * 3] - v[i]).abs() < 1e-15);
        }
    }
}
