//! Realising convex combinations of points in the joint real numerical range
//! `{(x^T A x, x^T B x) : |x| = 1}`, which is convex for `n >= 3`.

use super::{dot, neutral_vector_any3, polish_forms};
use crate::error::{Error, Result};
use crate::hollow::neutral_vector_sym2;
use crate::matrix::DenseMatrix;
use crate::rotation::GivensRotation;
use crate::EPS;

/// Unit `x` with `(x^T A x, x^T B x) = (1-t) (u^T A u, u^T B u) + t (v^T A v, v^T B v)`.
///
/// Only the symmetric parts of `A` and `B` matter.
pub fn realize_jnr_point(a: &DenseMatrix, b: &DenseMatrix, u: &[f64], v: &[f64], t: f64) -> Result<Vec<f64>> {
    let n = a.square_dim()?;
    if b.square_dim()? != n {
        return Err(Error::DimensionMismatch("A and B differ in size".into()));
    }
    if n < 3 {
        return Err(Error::Precondition(format!("need n >= 3, got {n}")));
    }
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!("vectors must have length {n}")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Precondition(format!("t = {t} is not in (0, 1)")));
    }
    for (name, x) in [("u", u), ("v", v)] {
        if (dot(x, x).sqrt() - 1.0).abs() > 1e-10 {
            return Err(Error::Precondition(format!("{name} is not a unit vector")));
        }
    }
    if dot(u, u) * dot(v, v) - dot(u, v).powi(2) <= 1e-20 {
        return Err(Error::Precondition("u and v are collinear".into()));
    }

    let sa = a.symmetric_part();
    let sb = b.symmetric_part();
    let (au, av) = (sa.matvec(u), sa.matvec(v));
    let (bu, bv) = (sb.matvec(u), sb.matvec(v));
    let c1 = (1.0 - t) * dot(u, &au) + t * dot(v, &av);
    let c2 = (1.0 - t) * dot(u, &bu) + t * dot(v, &bv);
    // With A' = A - c1 I and B' = B - c2 I the target is a common neutral
    // vector of both.

    // Orthonormal basis (p1, p2) of span{u, v}.
    let p1 = u.to_vec();
    let uv = dot(u, v);
    let mut p2: Vec<f64> = (0..n).map(|i| v[i] - uv * u[i]).collect();
    let r = dot(&p2, &p2).sqrt();
    p2.iter_mut().for_each(|x| *x /= r);
    let (ap1, ap2) = (sa.matvec(&p1), sa.matvec(&p2));
    let s11 = dot(&p1, &ap1) - c1;
    let s12 = dot(&p1, &ap2);
    let s22 = dot(&p2, &ap2) - c1;
    let half_tr = 0.5 * (s11 + s22);
    let rad = (0.25 * (s11 - s22).powi(2) + s12 * s12).sqrt();
    let (lo, hi) = (half_tr - rad, half_tr + rad);
    let tiny = 1e2 * EPS * (s11 * s11 + 2.0 * s12 * s12 + s22 * s22).sqrt().max(EPS * sa.frobenius_norm());
    let eigvec = |lambda: f64| -> Vec<f64> {
        // (S - lambda I) e = 0: use the better conditioned row.
        let (x, y) = if (s11 - lambda).abs() >= (s22 - lambda).abs() {
            (-s12, s11 - lambda)
        } else {
            (s22 - lambda, -s12)
        };
        let (x, y) = if x == 0.0 && y == 0.0 { (1.0, 0.0) } else { (x, y) };
        let r = x.hypot(y);
        (0..n).map(|i| (x * p1[i] + y * p2[i]) / r).collect()
    };

    let x0 = if hi <= tiny && lo >= -tiny {
        // A' vanishes on span{u, v}: any neutral vector of B' there works.
        let (bp1, bp2) = (sb.matvec(&p1), sb.matvec(&p2));
        let w = neutral_vector_sym2(
            dot(&p1, &bp1) - c2,
            dot(&p1, &bp2),
            dot(&p2, &bp2) - c2,
        )
        .or_else(|_| neutral_vector_sym2(dot(&p2, &bp2) - c2, dot(&p1, &bp2), dot(&p1, &bp1) - c2).map(|w| [w[1], w[0]]))?;
        (0..n).map(|i| w[0] * p1[i] + w[1] * p2[i]).collect()
    } else {
        let z_plus = (hi > tiny).then(|| eigvec(hi));
        let z_minus = (lo < -tiny).then(|| eigvec(lo));

        // y: unit, orthogonal to span{u, v}, from the best-conditioned e_k.
        let k = (0..n)
            .max_by(|&i, &j| {
                let ri = 1.0 - p1[i] * p1[i] - p2[i] * p2[i];
                let rj = 1.0 - p1[j] * p1[j] - p2[j] * p2[j];
                ri.partial_cmp(&rj).expect("finite")
            })
            .expect("n >= 3");
        let mut y: Vec<f64> = (0..n).map(|i| -(p1[k] * p1[i] + p2[k] * p2[i])).collect();
        y[k] += 1.0;
        for p in [&p1, &p2] {
            let d = dot(&y, p);
            y.iter_mut().zip(p.iter()).for_each(|(a, b)| *a -= d * b);
        }
        let r = dot(&y, &y).sqrt();
        y.iter_mut().for_each(|x| *x /= r);

        let ay = sa.matvec(&y);
        let yay = dot(&y, &ay) - c1;
        let z = if yay >= 0.0 { z_minus.or(z_plus) } else { z_plus.or(z_minus) }.expect("nonzero A' on span");
        let az = sa.matvec(&z);
        let zaz = dot(&z, &az) - c1;
        if yay * zaz > 0.0 && yay.abs() > tiny {
            return Err(Error::Breakdown("no sign change of A - c1 I on the constructed plane".into()));
        }
        let wc = neutral_vector_sym2(yay, dot(&y, &az), zaz)?;
        let w: Vec<f64> = (0..n).map(|i| wc[0] * y[i] + wc[1] * z[i]).collect();

        // U = [sqrt(1-t) u, sqrt(t) v, w] and the 3x3 compressions of A', B'.
        let cols = [
            u.iter().map(|x| (1.0 - t).sqrt() * x).collect::<Vec<_>>(),
            v.iter().map(|x| t.sqrt() * x).collect(),
            w,
        ];
        let mut at = DenseMatrix::zeros(3, 3);
        let mut bt = DenseMatrix::zeros(3, 3);
        let acols: Vec<Vec<f64>> = cols.iter().map(|c| sa.matvec(c)).collect();
        let bcols: Vec<Vec<f64>> = cols.iter().map(|c| sb.matvec(c)).collect();
        for i in 0..3 {
            for j in 0..3 {
                let g = dot(&cols[i], &cols[j]);
                at[(i, j)] = 0.5 * (dot(&cols[i], &acols[j]) + dot(&cols[j], &acols[i])) - c1 * g;
                bt[(i, j)] = 0.5 * (dot(&cols[i], &bcols[j]) + dot(&cols[j], &bcols[i])) - c2 * g;
            }
        }
        // Hollow the leading 2x2 block of the compressed A'.
        let q1 = neutral_vector_sym2(at[(0, 0)], at[(0, 1)], at[(1, 1)])?;
        let g = GivensRotation::with_column(0, 1, q1[0], q1[1]);
        let at = crate::rotation::apply_givens_similarity(&at, &g)?;
        let bt = crate::rotation::apply_givens_similarity(&bt, &g)?;
        let mut at = at.symmetric_part();
        for i in 0..3 {
            // Rounding remainders; the polish below absorbs them.
            at[(i, i)] = 0.0;
        }
        let bt = bt.symmetric_part();
        let zero_b = 1e2 * EPS * bt.frobenius_norm().max(EPS * sb.frobenius_norm());
        let zc = neutral_vector_any3(&at, &bt, zero_b)?.v;
        let qz = g.to_matrix(3).matvec(&zc);
        (0..n)
            .map(|i| qz[0] * cols[0][i] + qz[1] * cols[1][i] + qz[2] * cols[2][i])
            .collect::<Vec<f64>>()
    };

    let norm = dot(&x0, &x0).sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Breakdown("constructed vector vanished".into()));
    }
    Ok(polish_forms(&sa, &sb, (c1, c2), x0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &DenseMatrix, b: &DenseMatrix, u: &[f64], v: &[f64], t: f64) -> (f64, f64) {
        let x = realize_jnr_point(a, b, u, v, t).unwrap();
        assert!((dot(&x, &x) - 1.0).abs() < 1e-14);
        let c1 = (1.0 - t) * a.quadratic_form(u) + t * a.quadratic_form(v);
        let c2 = (1.0 - t) * b.quadratic_form(u) + t * b.quadratic_form(v);
        ((a.quadratic_form(&x) - c1).abs(), (b.quadratic_form(&x) - c2).abs())
    }

    #[test]
    fn single_form_case() {
        let a = DenseMatrix::from_diagonal(&[1.0, -1.0, 0.0]);
        let b = DenseMatrix::zeros(3, 3);
        let (ra, rb) = check(&a, &b, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 0.5);
        assert!(ra < 1e-14 && rb == 0.0);
    }

    #[test]
    fn padded_two_by_two_counterexample() {
        // diag(1,-1) and the swap: the 2x2 joint range is a circle, but the
        // padded 3x3 pair reaches the midpoint.
        let a = DenseMatrix::from_diagonal(&[1.0, -1.0, 0.0]);
        let b = DenseMatrix::from_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        let (ra, rb) = check(&a, &b, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 0.5);
        assert!(ra < 1e-14 && rb < 1e-14, "{ra} {rb}");
    }

    #[test]
    fn dense_four_by_four() {
        let a = DenseMatrix::from_fn(4, 4, |i, j| ((i * 3 + j * 5) % 7) as f64 - 3.0);
        let b = DenseMatrix::from_fn(4, 4, |i, j| ((i * 2 + j * j) % 5) as f64 - 2.0);
        let (ra, rb) = check(&a, &b, &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], 0.3);
        assert!(ra < 1e-10 && rb < 1e-10, "{ra} {rb}");
    }

    #[test]
    fn preconditions() {
        let a = DenseMatrix::identity(3);
        let e1 = [1.0, 0.0, 0.0];
        assert!(realize_jnr_point(&a, &a, &e1, &[-1.0, 0.0, 0.0], 0.5).is_err());
        assert!(realize_jnr_point(&a, &a, &e1, &[0.0, 1.0, 0.0], 1.0).is_err());
        let a2 = DenseMatrix::identity(2);
        assert!(realize_jnr_point(&a2, &a2, &[1.0, 0.0], &[0.0, 1.0], 0.5).is_err());
    }
}
