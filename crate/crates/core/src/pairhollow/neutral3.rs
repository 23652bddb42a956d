//! Common neutral vectors of two 3x3 quadratic forms.
//!
//! With `A3 = 1/2 [[0,a,b],[a,0,c],[b,c,0]]` hollow and
//! `B3 = 1/2 [[2d-,alpha,beta],[alpha,2d+,gamma],[beta,gamma,2]]`, `d- < 0 < d+`,
//! we look for `v = (1, x, y)` with
//!
//! ```text
//! a x + (b + c x) y = 0
//! d- + alpha x + beta y + gamma x y + d+ x^2 + y^2 = 0
//! ```
//!
//! and fall back to `v = (0, x, y)` in the one sub-case where no such vector
//! exists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::poly::{real_roots, Polynomial};
use crate::EPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeutralBranch {
    /// A diagonal entry of `B3` vanished; `v` is a unit basis vector.
    B11Zero,
    AZero,
    BZero,
    CNonzeroQuartic,
    CZeroQuadratic,
    CZeroFallback2x2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeutralPair3 {
    pub v: [f64; 3],
    pub branch: NeutralBranch,
}

/// Root of `q2 x^2 + q1 x + q0` (with `q0 q2 < 0`) equal to
/// `(-q1 + sqrt(q1^2 - 4 q2 q0)) / (2 q2)`, evaluated without cancellation.
fn plus_root(q2: f64, q1: f64, q0: f64) -> f64 {
    let disc = (q1 * q1 - 4.0 * q2 * q0).max(0.0).sqrt();
    if q1 >= 0.0 {
        // -q1 + disc = -4 q2 q0 / (q1 + disc)
        if q1 + disc == 0.0 {
            0.0
        } else {
            -2.0 * q0 / (q1 + disc)
        }
    } else {
        (disc - q1) / (2.0 * q2)
    }
}

/// Coefficients (ascending) of the quartic in `x` obtained by eliminating
/// `y = -a x / (b + c x)` and clearing the denominator.
pub fn elimination_quartic(a: f64, b: f64, c: f64, dm: f64, dp: f64, alpha: f64, beta: f64, gamma: f64) -> [f64; 5] {
    [
        dm * b * b,
        2.0 * dm * b * c + alpha * b * b - beta * a * b,
        dm * c * c + 2.0 * alpha * b * c - beta * a * c - gamma * a * b + dp * b * b + a * a,
        alpha * c * c - gamma * a * c + 2.0 * dp * b * c,
        dp * c * c,
    ]
}

fn sym3(m: &DenseMatrix) -> [[f64; 3]; 3] {
    let mut s = [[0.0; 3]; 3];
    for (i, row) in s.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = m.sym(i, j);
        }
    }
    s
}

fn form3(s: &[[f64; 3]; 3], v: &[f64; 3]) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += s[i][j] * v[i] * v[j];
        }
    }
    acc
}

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / r, v[1] / r, v[2] / r]
}

/// Common neutral vector of a normalised pair: `A3` hollow, `B3` with
/// `b11 < 0 < b22` and `b33 = 1`.
pub fn common_neutral_vector_3(a3: &DenseMatrix, b3: &DenseMatrix) -> Result<NeutralPair3> {
    if a3.rows() != 3 || a3.cols() != 3 || b3.rows() != 3 || b3.cols() != 3 {
        return Err(Error::DimensionMismatch("common_neutral_vector_3 needs 3x3 inputs".into()));
    }
    let sa = sym3(a3);
    let sb = sym3(b3);
    let na = a3.symmetric_part().frobenius_norm();
    let nb = b3.symmetric_part().frobenius_norm();
    let tol_a = 1e2 * EPS * na;
    if (0..3).any(|i| sa[i][i].abs() > tol_a) {
        return Err(Error::Precondition("A3 is not hollow".into()));
    }
    let (dm, dp) = (sb[0][0], sb[1][1]);
    if (sb[2][2] - 1.0).abs() > 1e2 * EPS * nb || !(dm < 0.0) || !(dp > 0.0) {
        return Err(Error::Precondition(format!(
            "B3 not normalised: diagonal ({dm}, {dp}, {})",
            sb[2][2]
        )));
    }
    let (a, b, c) = (2.0 * sa[0][1], 2.0 * sa[0][2], 2.0 * sa[1][2]);
    let (alpha, beta, gamma) = (2.0 * sb[0][1], 2.0 * sb[0][2], 2.0 * sb[1][2]);

    let (v, branch) = if a.abs() <= tol_a {
        let x = plus_root(dp, alpha, dm);
        ([1.0, x, 0.0], NeutralBranch::AZero)
    } else if b.abs() <= tol_a {
        let y = plus_root(1.0, beta, dm);
        ([1.0, 0.0, y], NeutralBranch::BZero)
    } else if c.abs() > tol_a {
        let coeffs = elimination_quartic(a, b, c, dm, dp, alpha, beta, gamma);
        let poly = Polynomial::new(&coeffs)?;
        let scale_b = b.abs().max(c.abs());
        let x = real_roots(&poly)?
            .into_iter()
            .filter(|x| (b + c * x).abs() > 1e-10 * scale_b * x.abs().max(1.0))
            .min_by(|x, y| {
                x.abs()
                    .partial_cmp(&y.abs())
                    .expect("finite roots")
                    .then(x.partial_cmp(y).expect("finite roots"))
            })
            .ok_or_else(|| Error::Breakdown("elimination quartic has no usable real root".into()))?;
        let y = -a * x / (b + c * x);
        ([1.0, x, y], NeutralBranch::CNonzeroQuartic)
    } else {
        let r = a / b;
        let q2 = -gamma * r + dp + r * r;
        if q2 > 1e2 * EPS * (dp.abs() + gamma.abs() * r.abs() + r * r) {
            let x = plus_root(q2, alpha - beta * r, dm);
            ([1.0, x, -r * x], NeutralBranch::CZeroQuadratic)
        } else {
            // [[2d+, gamma], [gamma, 2]] is not definite here.
            let y = plus_root(1.0, gamma, dp);
            ([0.0, 1.0, y], NeutralBranch::CZeroFallback2x2)
        }
    };

    let v = polish_pair3(&sa, &sb, normalized(v));
    let bound = 1e3 * EPS * (na + nb);
    let (ra, rb) = (form3(&sa, &v), form3(&sb, &v));
    if ra.abs() > bound || rb.abs() > bound {
        return Err(Error::Breakdown(format!(
            "common neutral vector residuals ({ra:e}, {rb:e}) exceed {bound:e} in branch {branch:?}"
        )));
    }
    Ok(NeutralPair3 { v, branch })
}

/// A few Newton steps on the unit sphere for `(v^T A v, v^T B v) = 0`.
fn polish_pair3(sa: &[[f64; 3]; 3], sb: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    let a = DenseMatrix::from_rows(sa).expect("finite");
    let b = DenseMatrix::from_rows(sb).expect("finite");
    let x = super::polish_forms(&a, &b, (0.0, 0.0), v.to_vec());
    [x[0], x[1], x[2]]
}

/// Common neutral vector of symmetric 3x3 forms with `A3` hollow and `B3`
/// having nonzero diagonal entries of both signs (or a vanishing one). Takes
/// care of the permutation and scaling into the normalised layout.
pub(crate) fn neutral_vector_any3(a3: &DenseMatrix, b3: &DenseMatrix, zero_b: f64) -> Result<NeutralPair3> {
    let d = b3.diagonal();
    if let Some(j) = (0..3).find(|&j| d[j].abs() <= zero_b) {
        let mut v = [0.0; 3];
        v[j] = 1.0;
        return Ok(NeutralPair3 {
            v,
            branch: NeutralBranch::B11Zero,
        });
    }
    let positives = d.iter().filter(|x| **x > 0.0).count();
    if positives == 0 || positives == 3 {
        return Err(Error::Precondition("B3 diagonal has no sign change".into()));
    }
    let majority_positive = positives == 2;
    let mut majority: Vec<usize> = (0..3).filter(|&j| (d[j] > 0.0) == majority_positive).collect();
    let minority = (0..3).find(|&j| (d[j] > 0.0) != majority_positive).expect("sign change");
    majority.sort_by(|&i, &j| d[i].abs().partial_cmp(&d[j].abs()).expect("finite"));
    // Minority sign first, then the larger and the smaller majority entry.
    // Dividing by the latter (sign included) makes b33 = 1 and d- < 0 < d+;
    // negating B3 does not change its neutral vectors.
    let perm = [minority, majority[1], majority[0]];
    let divisor = d[majority[0]];

    let ap = a3.symmetric_part().principal(&perm);
    let bp = b3.symmetric_part().principal(&perm).scale(1.0 / divisor);
    let np = common_neutral_vector_3(&ap, &bp)?;
    let mut v = [0.0; 3];
    for k in 0..3 {
        v[perm[k]] = np.v[k];
    }
    Ok(NeutralPair3 { v, branch: np.branch })
}
