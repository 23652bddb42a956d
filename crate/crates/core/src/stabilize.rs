//! Stabilising skew-symmetric perturbations.
//!
//! Two mechanisms are covered. A fast rotation `A + mu M` with `M` skew and
//! Hamiltonian stabilises any `2n x 2n` matrix with negative trace. Noise
//! `dx = A x dt + mu M x dw` (Stratonovich, hence Ito drift
//! `A + mu^2 M^2 / 2`) with skew `M` stabilises in mean square, and a
//! common `M` exists for two systems once both are brought to a suitable
//! diagonal pattern by one orthogonal transformation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hollow::{default_tol, hollowise};
use crate::matrix::DenseMatrix;
use crate::pairhollow::pair_hollowise;
use crate::rotation::orthogonality_residual;
use crate::spectrum::{kron, spectral_abscissa};
use crate::sympl::sympl_constant_diagonalise;
use crate::EPS;

/// `M(omega)`: a leading zero for odd `n`, then blocks `[[0, w], [-w, 0]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePattern {
    pub n: usize,
    pub omega: Vec<f64>,
    pub matrix: DenseMatrix,
}

pub fn default_omega(n: usize) -> Vec<f64> {
    (1..=n / 2).map(|k| k as f64).collect()
}

pub fn make_noise_pattern(n: usize, omega: &[f64]) -> Result<NoisePattern> {
    if omega.len() != n / 2 {
        return Err(Error::Precondition(format!(
            "need {} frequencies for n = {n}, got {}",
            n / 2,
            omega.len()
        )));
    }
    if omega.iter().any(|w| !(w.is_finite() && *w > 0.0)) || omega.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("frequencies must be positive and strictly increasing".into()));
    }
    let off = n % 2;
    let mut m = DenseMatrix::zeros(n, n);
    for (k, w) in omega.iter().enumerate() {
        let i = off + 2 * k;
        m[(i, i + 1)] = *w;
        m[(i + 1, i)] = -*w;
    }
    Ok(NoisePattern {
        n,
        omega: omega.to_vec(),
        matrix: m,
    })
}

/// Matrix of `X -> N X + X N^T + mu^2 M X M^T` on column-stacked `vec(X)`,
/// with `N = A + mu^2 M^2 / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovOperatorMatrix {
    pub n: usize,
    pub mu: f64,
    pub k: DenseMatrix,
}

fn ito_drift(a: &DenseMatrix, m: &DenseMatrix, mu: f64) -> Result<DenseMatrix> {
    a.add(&m.matmul(m)?.scale(0.5 * mu * mu))
}

pub fn build_lyapunov_matrix(a: &DenseMatrix, m: &DenseMatrix, mu: f64) -> Result<LyapunovOperatorMatrix> {
    let n = a.square_dim()?;
    if m.square_dim()? != n {
        return Err(Error::DimensionMismatch(format!("A is {n}x{n}, M is {}x{}", m.rows(), m.cols())));
    }
    let drift = ito_drift(a, m, mu)?;
    let id = DenseMatrix::identity(n);
    let k = kron(&id, &drift)?
        .add(&kron(&drift, &id)?)?
        .add(&kron(m, m)?.scale(mu * mu))?;
    Ok(LyapunovOperatorMatrix { n, mu, k })
}

impl LyapunovOperatorMatrix {
    /// The operator applied directly, without the Kronecker form.
    pub fn apply_direct(a: &DenseMatrix, m: &DenseMatrix, mu: f64, x: &DenseMatrix) -> Result<DenseMatrix> {
        let drift = ito_drift(a, m, mu)?;
        drift
            .matmul(x)?
            .add(&x.matmul(&drift.transpose())?)?
            .add(&m.matmul(x)?.matmul(&m.transpose())?.scale(mu * mu))
    }

    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.rows() != self.n || x.cols() != self.n {
            return Err(Error::DimensionMismatch("probe matrix has the wrong size".into()));
        }
        let y = self.k.matvec(&x.vec_columns());
        Ok(DenseMatrix::from_vec_columns(self.n, self.n, &y))
    }
}

/// Mean-square stability of `dx = A x dt + mu M x dw` (Stratonovich):
/// `(abscissa < 0, abscissa)` of the Lyapunov operator matrix.
pub fn ms_stable(a: &DenseMatrix, m: &DenseMatrix, mu: f64) -> Result<(bool, f64)> {
    let alpha = spectral_abscissa(&build_lyapunov_matrix(a, m, mu)?.k)?;
    Ok((alpha < 0.0, alpha))
}

/// Settings for the gain search: a doubling grid `1, 2, 4, ...` up to
/// `mu_max`, then bisection of the first sign change of the largest
/// abscissa down to relative width `refine_rel` (at most 40 halvings).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainSearch {
    pub mu_max: f64,
    pub refine_rel: f64,
}

impl Default for GainSearch {
    fn default() -> Self {
        Self {
            mu_max: 16384.0,
            refine_rel: 1e-4,
        }
    }
}

const MAX_BISECTIONS: usize = 40;

/// Outcome of a gain search. `bracket = (lo, hi)` straddles the sign change
/// (`lo` unstable, `hi` stable) unless the first grid point was already
/// stable, in which case `lo == hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainResult {
    pub mu: f64,
    pub bracket: (f64, f64),
    pub abscissae: Vec<f64>,
    pub grid: Vec<(f64, f64)>,
}

/// Searches for the first gain where every abscissa from `eval` is negative.
pub fn search_gain(opts: &GainSearch, eval: impl Fn(f64) -> Result<Vec<f64>>) -> Result<GainResult> {
    if !(opts.mu_max >= 1.0) || !(opts.refine_rel > 0.0) {
        return Err(Error::Precondition("need mu_max >= 1 and refine_rel > 0".into()));
    }
    let worst = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut grid = Vec::new();
    let mut prev: Option<f64> = None;
    let mut mu = 1.0;
    while mu <= opts.mu_max {
        let abscissae = eval(mu)?;
        let w = worst(&abscissae);
        grid.push((mu, w));
        if w < 0.0 {
            let Some(mut lo) = prev else {
                return Ok(GainResult {
                    mu,
                    bracket: (mu, mu),
                    abscissae,
                    grid,
                });
            };
            let (mut hi, mut hi_abs) = (mu, abscissae);
            for _ in 0..MAX_BISECTIONS {
                if (hi - lo) <= opts.refine_rel * hi {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let a = eval(mid)?;
                if worst(&a) < 0.0 {
                    hi = mid;
                    hi_abs = a;
                } else {
                    lo = mid;
                }
            }
            return Ok(GainResult {
                mu: hi,
                bracket: (lo, hi),
                abscissae: hi_abs,
                grid,
            });
        }
        prev = Some(mu);
        mu *= 2.0;
    }
    Err(Error::NoStableGain {
        mu_max: opts.mu_max,
        grid,
    })
}

/// A stabilising perturbation: the effective matrix is `mu * m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizationDesign {
    pub m: DenseMatrix,
    pub mu: f64,
    pub abscissae: Vec<f64>,
    pub bracket: (f64, f64),
    pub grid: Vec<(f64, f64)>,
    /// The orthogonal (for rotation designs, symplectic orthogonal) `U`
    /// with `m = U M0 U^T`.
    pub transform: DenseMatrix,
    pub hamiltonian: bool,
}

/// `||M + M^T||_F`.
pub fn skew_residual(m: &DenseMatrix) -> f64 {
    m.add(&m.transpose()).expect("square").frobenius_norm()
}

/// `||J M - (J M)^T||_F` with `J = [[0, I], [-I, 0]]`.
pub fn hamiltonian_residual(m: &DenseMatrix) -> Result<f64> {
    let size = m.square_dim()?;
    if size % 2 != 0 {
        return Err(Error::Precondition(format!("odd dimension {size}")));
    }
    let n = size / 2;
    let jm = DenseMatrix::from_fn(size, size, |i, j| if i < n { m[(i + n, j)] } else { -m[(i - n, j)] });
    Ok(jm.sub(&jm.transpose())?.frobenius_norm())
}

/// True iff `diag(U^T (A - tr(A)/n I) U)` reads `[d1, -d1, d2, -d2, ..., (0)]`
/// within `tol * ||A||_F`, the trailing zero present for odd `n`.
pub fn verify_block_hollow_pattern(u: &DenseMatrix, a: &DenseMatrix, tol: f64) -> Result<bool> {
    let n = a.square_dim()?;
    if u.square_dim()? != n {
        return Err(Error::DimensionMismatch("U and A differ in size".into()));
    }
    if orthogonality_residual(u)? > tol.max(1e2 * n as f64 * EPS) * n as f64 {
        return Err(Error::Precondition("U is not orthogonal".into()));
    }
    let shifted = a.shift_diagonal(-a.trace() / n as f64);
    let d = u.congruence(&shifted)?.diagonal();
    let bound = tol * a.frobenius_norm();
    let pairs_ok = (0..n / 2).all(|k| (d[2 * k] + d[2 * k + 1]).abs() <= bound);
    let tail_ok = n % 2 == 0 || d[n - 1].abs() <= bound;
    Ok(pairs_ok && tail_ok)
}

fn check_negative_traces(systems: &[DenseMatrix]) -> Result<usize> {
    let first = systems
        .first()
        .ok_or_else(|| Error::Precondition("no systems given".into()))?;
    let n = first.square_dim()?;
    for (j, a) in systems.iter().enumerate() {
        if a.square_dim()? != n {
            return Err(Error::DimensionMismatch(format!("system {j} has a different size")));
        }
        a.check_finite()?;
        if !(a.trace() < 0.0) {
            return Err(Error::Precondition(format!("system {j} has trace {} >= 0", a.trace())));
        }
    }
    Ok(n)
}

/// Gain search for a given noise direction `m` over several systems.
pub fn noise_gain_search(systems: &[DenseMatrix], m: &DenseMatrix, opts: &GainSearch) -> Result<GainResult> {
    check_negative_traces(systems)?;
    search_gain(opts, |mu| systems.iter().map(|a| ms_stable(a, m, mu).map(|r| r.1)).collect())
}

/// Gain search for a given rotation direction `m`.
pub fn rotation_gain_search(a: &DenseMatrix, m: &DenseMatrix, opts: &GainSearch) -> Result<GainResult> {
    check_negative_traces(std::slice::from_ref(a))?;
    search_gain(opts, |mu| Ok(vec![spectral_abscissa(&a.add(&m.scale(mu))?)?]))
}

/// Common noise matrix `mu U M(omega) U^T` stabilising every system in mean
/// square. For one or two systems `U` is constructed; for more, pass a `U`
/// that brings each shifted system to the paired diagonal pattern.
pub fn noise_stabilize(
    systems: &[DenseMatrix],
    omega: Option<&[f64]>,
    supplied_u: Option<&DenseMatrix>,
    opts: &GainSearch,
) -> Result<StabilizationDesign> {
    let n = check_negative_traces(systems)?;
    let shifted: Vec<DenseMatrix> = systems
        .iter()
        .map(|a| a.shift_diagonal(-a.trace() / n as f64))
        .collect();
    let tol = default_tol(n);
    let u = match (supplied_u, systems.len()) {
        (Some(u), _) => {
            for (j, a) in systems.iter().enumerate() {
                if !verify_block_hollow_pattern(u, a, 1e-8)? {
                    return Err(Error::Precondition(format!(
                        "supplied U does not give system {j} the paired diagonal pattern"
                    )));
                }
            }
            // The pattern puts the unpaired zero last, M(omega) puts it
            // first: rotate the columns so the last becomes the first.
            if n % 2 == 1 {
                DenseMatrix::from_fn(n, n, |i, j| u[(i, (j + n - 1) % n)])
            } else {
                u.clone()
            }
        }
        (None, 1) => hollowise(&shifted[0], tol)?.q.into_q(),
        (None, 2) => pair_hollowise(&shifted[0], &shifted[1], tol)?.q.into_q(),
        (None, m) => {
            return Err(Error::Precondition(format!(
                "{m} systems need a supplied common transformation"
            )))
        }
    };
    let omega = omega.map(<[f64]>::to_vec).unwrap_or_else(|| default_omega(n));
    let pattern = make_noise_pattern(n, &omega)?;
    let m = u.matmul(&pattern.matrix)?.matmul(&u.transpose())?;
    // Exact skew-symmetry; the product is skew up to rounding only.
    let m = m.sub(&m.transpose())?.scale(0.5);
    let found = noise_gain_search(systems, &m, opts)?;
    Ok(StabilizationDesign {
        m,
        mu: found.mu,
        abscissae: found.abscissae,
        bracket: found.bracket,
        grid: found.grid,
        transform: u,
        hamiltonian: false,
    })
}

/// Default rotation speeds `1, 2, ..., n` for a `2n x 2n` system.
pub fn default_lambda(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64).collect()
}

/// Skew-symmetric Hamiltonian `mu U [[0, L], [-L, 0]] U^T` making
/// `A + mu M` Hurwitz, with `U` symplectic orthogonal and `U^T A U` of
/// constant diagonal.
pub fn rotation_stabilize(a: &DenseMatrix, lambda: Option<&[f64]>, opts: &GainSearch) -> Result<StabilizationDesign> {
    let size = a.square_dim()?;
    if size % 2 != 0 {
        return Err(Error::Precondition(format!("odd dimension {size}")));
    }
    check_negative_traces(std::slice::from_ref(a))?;
    let n = size / 2;
    let lambda = lambda.map(<[f64]>::to_vec).unwrap_or_else(|| default_lambda(n));
    if lambda.len() != n {
        return Err(Error::Precondition(format!("need {n} rotation speeds, got {}", lambda.len())));
    }
    for i in 0..n {
        if !lambda[i].is_finite() {
            return Err(Error::Precondition("non-finite rotation speed".into()));
        }
        for j in 0..i {
            if lambda[i].abs() == lambda[j].abs() {
                return Err(Error::Precondition(format!(
                    "rotation speeds {} and {} have equal modulus",
                    lambda[j], lambda[i]
                )));
            }
        }
    }
    let u = sympl_constant_diagonalise(a)?.u.into_q();
    let mut m0 = DenseMatrix::zeros(size, size);
    for (k, l) in lambda.iter().enumerate() {
        m0[(k, k + n)] = *l;
        m0[(k + n, k)] = -*l;
    }
    let m = u.matmul(&m0)?.matmul(&u.transpose())?;
    let m = m.sub(&m.transpose())?.scale(0.5);
    let ham = hamiltonian_residual(&m)?;
    if ham > 1e2 * size as f64 * EPS * m.frobenius_norm().max(1.0) {
        return Err(Error::Breakdown(format!("rotation matrix is not Hamiltonian (residual {ham:e})")));
    }
    let found = rotation_gain_search(a, &m, opts)?;
    Ok(StabilizationDesign {
        m,
        mu: found.mu,
        abscissae: found.abscissae,
        bracket: found.bracket,
        grid: found.grid,
        transform: u,
        hamiltonian: true,
    })
}
