//! Eigenvalues of general real matrices and Kronecker products.
//!
//! The eigenvalue routine is the classical balance / Householder-Hessenberg /
//! Francis double-shift QR pipeline with exceptional shifts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub abscissa: f64,
}

impl Spectrum {
    fn from_eigenvalues(eigenvalues: Vec<Complex64>) -> Self {
        let abscissa = eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        Self {
            eigenvalues,
            abscissa,
        }
    }
}

const MAX_ITERATIONS_PER_EIGENVALUE: usize = 60;

pub fn eigenvalues(a: &DenseMatrix) -> Result<Spectrum> {
    let n = a.square_dim()?;
    a.check_finite()?;
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: vec![],
            abscissa: f64::NEG_INFINITY,
        });
    }
    let mut h: Vec<f64> = a.as_slice().to_vec();
    balance(&mut h, n);
    hessenberg(&mut h, n);
    let ev = hessenberg_qr(&mut h, n)?;
    Ok(Spectrum::from_eigenvalues(ev))
}

/// Spectral abscissa, `max Re sigma(A)`.
pub fn spectral_abscissa(a: &DenseMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.abscissa)
}

fn balance(a: &mut [f64], n: usize) {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let s = c + r;
                let mut f = 1.0;
                let mut g = r / RADIX;
                while c < g {
                    f *= RADIX;
                    c *= SQRDX;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= SQRDX;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i * n + j] *= g;
                    }
                    for j in 0..n {
                        a[j * n + i] *= f;
                    }
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut [f64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n - 2 {
        let alpha2: f64 = (k + 1..n).map(|i| a[i * n + k] * a[i * n + k]).sum();
        let tail: f64 = (k + 2..n).map(|i| a[i * n + k] * a[i * n + k]).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let alpha = -x0.signum() * alpha2.sqrt();
        // v = x - alpha e1, H = I - 2 v v^T / (v^T v)
        for i in k + 1..n {
            v[i] = a[i * n + k];
        }
        v[k + 1] -= alpha;
        let vtv: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        let beta = 2.0 / vtv;

        // A <- H A (rows k+1..n, columns k..n)
        for wj in w.iter_mut().take(n).skip(k) {
            *wj = 0.0;
        }
        for i in k + 1..n {
            let vi = v[i];
            let row = &a[i * n..(i + 1) * n];
            for j in k..n {
                w[j] += vi * row[j];
            }
        }
        for i in k + 1..n {
            let f = beta * v[i];
            let row = &mut a[i * n..(i + 1) * n];
            for j in k..n {
                row[j] -= f * w[j];
            }
        }
        // A <- A H (all rows, columns k+1..n)
        for i in 0..n {
            let row = &mut a[i * n..(i + 1) * n];
            let s: f64 = (k + 1..n).map(|j| row[j] * v[j]).sum::<f64>() * beta;
            for j in k + 1..n {
                row[j] -= s * v[j];
            }
        }
        a[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            a[i * n + k] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// iteration, deflating from the bottom.
fn hessenberg_qr(a: &mut [f64], n: usize) -> Result<Vec<Complex64>> {
    let idx = |i: usize, j: usize| i * n + j;
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[idx(i, j)].abs();
        }
    }

    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // Find a negligible subdiagonal element.
            let mut l = nu;
            while l >= 1 {
                let mut s = a[idx(l - 1, l - 1)].abs() + a[idx(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[idx(l, l - 1)].abs() + s == s {
                    a[idx(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[idx(nu, nu)];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[idx(nu - 1, nu - 1)];
            let mut w = a[idx(nu, nu - 1)] * a[idx(nu - 1, nu)];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != 0.0 {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }

            if its == MAX_ITERATIONS_PER_EIGENVALUE {
                return Err(Error::Breakdown("QR iteration did not converge".into()));
            }
            if its % 10 == 0 && its > 0 {
                // Exceptional shift.
                t += x;
                for i in 0..=nu {
                    a[idx(i, i)] -= x;
                }
                let s = a[idx(nu, nu - 1)].abs() + a[idx(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // Look for two consecutive small subdiagonal elements.
            let (mut p, mut q, mut r): (f64, f64, f64);
            let mut m = nu - 2;
            loop {
                let z = a[idx(m, m)];
                let rr = x - z;
                let s = y - z;
                p = (rr * s - w) / a[idx(m + 1, m)] + a[idx(m, m + 1)];
                q = a[idx(m + 1, m + 1)] - z - rr - s;
                r = a[idx(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[idx(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[idx(m - 1, m - 1)].abs() + z.abs() + a[idx(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[idx(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[idx(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=nn and columns m..=nn.
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[idx(k, k - 1)];
                    q = a[idx(k + 1, k - 1)];
                    r = if k != nu - 1 { a[idx(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[idx(k, k - 1)] = -a[idx(k, k - 1)];
                        }
                    } else {
                        a[idx(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[idx(k, j)] + q * a[idx(k + 1, j)];
                        if k != nu - 1 {
                            pp += r * a[idx(k + 2, j)];
                            a[idx(k + 2, j)] -= pp * z;
                        }
                        a[idx(k + 1, j)] -= pp * y;
                        a[idx(k, j)] -= pp * x;
                    }
                    let mmin = nu.min(k + 3);
                    for i in l..=mmin {
                        let mut pp = x * a[idx(i, k)] + y * a[idx(i, k + 1)];
                        if k != nu - 1 {
                            pp += z * a[idx(i, k + 2)];
                            a[idx(i, k + 2)] -= pp * r;
                        }
                        a[idx(i, k + 1)] -= pp * q;
                        a[idx(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}

/// Kronecker product: block `(i, j)` is `a_ij * B`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    a.check_finite()?;
    b.check_finite()?;
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = DenseMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Largest distance in a greedy nearest-neighbour matching of two eigenvalue
/// multisets of equal size. Returns infinity on a size mismatch.
pub fn eigenvalue_mismatch(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    // Match well-separated values first so clusters do not steal partners.
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| {
        (a[i].re, a[i].im)
            .partial_cmp(&(a[j].re, a[j].im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for i in order {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, bj) in b.iter().enumerate() {
            if !used[j] {
                let d = (a[i] - bj).norm();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
        }
        used[best] = true;
        worst = worst.max(best_d);
    }
    worst
}
