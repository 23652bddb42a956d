//! Independent oracles for the numerical kernels.

use hollowise::matrix::DenseMatrix;
use hollowise::poly::{real_roots, Polynomial};
use hollowise::random;
use hollowise::spectrum::kron;
use hollowise::stabilize::{build_lyapunov_matrix, LyapunovOperatorMatrix};
use rand::Rng;

/// Sign-change bisection on a uniform grid over the Cauchy bound interval.
fn grid_roots(c: &[f64]) -> Vec<f64> {
    let lead = c[c.len() - 1];
    let bound = 1.0 + c[..c.len() - 1].iter().map(|x| (x / lead).abs()).fold(0.0, f64::max);
    let p = |x: f64| c.iter().rev().fold(0.0, |acc, ci| acc * x + ci);
    let steps = 20_000;
    let h = 2.0 * bound / steps as f64;
    let mut roots = Vec::new();
    let mut x0 = -bound;
    let mut f0 = p(x0);
    for k in 1..=steps {
        let x1 = -bound + k as f64 * h;
        let f1 = p(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = p(mid);
                if fm == 0.0 || mid == lo || mid == hi {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm * flo < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

#[test]
fn quartic_roots_match_bisection_oracle() {
    let mut rng = random::rng(11);
    let mut checked = 0;
    for _ in 0..10_000 {
        let c: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let got = real_roots(&Polynomial::new(&c).unwrap()).unwrap();
        for r in grid_roots(&c) {
            let best = got.iter().map(|g| (g - r).abs()).fold(f64::INFINITY, f64::min);
            assert!(best <= 1e-8 * r.abs().max(1.0), "coefficients {c:?}: oracle root {r}, got {got:?}");
            checked += 1;
        }
    }
    assert!(checked > 5_000);
}

fn column_vec_product(k: &DenseMatrix, x: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_vec_columns(x.rows(), x.cols(), &k.matvec(&x.vec_columns()))
}

#[test]
fn kron_vec_identity() {
    let mut rng = random::rng(3);
    for _ in 0..20 {
        let n = random::gaussian(3, 3, &mut rng);
        let x = random::gaussian(3, 3, &mut rng);
        let i = DenseMatrix::identity(3);
        let k = kron(&i, &n).unwrap().add(&kron(&n, &i).unwrap()).unwrap();
        let direct = n.matmul(&x).unwrap().add(&x.matmul(&n.transpose()).unwrap()).unwrap();
        let via = column_vec_product(&k, &x);
        assert!(direct.sub(&via).unwrap().max_abs() < 1e-12);
    }
}

#[test]
fn lyapunov_matrix_matches_operator() {
    let mut rng = random::rng(5);
    for n in [2, 3, 6] {
        let a = random::gaussian(n, n, &mut rng);
        let g = random::gaussian(n, n, &mut rng);
        let m = g.sub(&g.transpose()).unwrap();
        for mu in [0.0, 0.7, 5.0] {
            let op = build_lyapunov_matrix(&a, &m, mu).unwrap();
            for _ in 0..20 {
                let x = random::gaussian(n, n, &mut rng);
                let nd = a.add(&m.matmul(&m).unwrap().scale(0.5 * mu * mu)).unwrap();
                let direct = nd
                    .matmul(&x)
                    .unwrap()
                    .add(&x.matmul(&nd.transpose()).unwrap())
                    .unwrap()
                    .add(&m.matmul(&x).unwrap().matmul(&m.transpose()).unwrap().scale(mu * mu))
                    .unwrap();
                let applied = LyapunovOperatorMatrix::apply_direct(&a, &m, mu, &x).unwrap();
                assert!(applied.sub(&direct).unwrap().max_abs() <= 1e-12 * direct.max_abs().max(1.0));
                let via = column_vec_product(&op.k, &x);
                let err = direct.sub(&via).unwrap().frobenius_norm();
                assert!(err <= 1e-10 * direct.frobenius_norm().max(1.0), "n={n} mu={mu} err={err}");
            }
        }
    }
}
