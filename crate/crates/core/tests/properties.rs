//! Property tests for the transformation routines on random inputs.

use hollowise::hollow::default_tol;
use hollowise::matrix::{almost_hollow_residual, diagonal_spread, max_abs_diagonal, DenseMatrix};
use hollowise::pairhollow::{pair_hollowise, realize_jnr_point};
use hollowise::random;
use hollowise::rotation::{apply_givens_similarity, orthogonality_residual, GivensRotation};
use hollowise::spectrum::{eigenvalue_mismatch, eigenvalues};
use hollowise::sympl::{equalize_halves, sympl_constant_diagonalise, sympl_hollowise_4x4, symplectic_residual};
use hollowise::{hollowise, EPS};
use proptest::prelude::*;
use rand::Rng;

fn same_spectrum(a: &DenseMatrix, b: &DenseMatrix) -> bool {
    let ea = eigenvalues(a).unwrap().eigenvalues;
    let eb = eigenvalues(b).unwrap().eigenvalues;
    eigenvalue_mismatch(&ea, &eb) <= 1e-8 * a.spectral_norm().max(1.0)
}

fn nonzero_diagonal(a: &DenseMatrix) -> usize {
    a.diagonal().iter().filter(|d| **d != 0.0).count()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn hollowise_invariants(n in 2usize..=50, seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let a = random::zero_trace(n, &mut rng);
        let r = hollowise(&a, default_tol(n)).unwrap();
        let e = n as f64 * EPS;
        let norm = a.frobenius_norm();
        prop_assert!(max_abs_diagonal(&r.transformed) <= 1e3 * e * norm);
        prop_assert!(r.q.orthogonality_residual() <= 1e2 * e);
        let recomputed = r.q.q().congruence(&a).unwrap();
        prop_assert!(recomputed.sub(&r.transformed).unwrap().frobenius_norm() <= 1e2 * e * norm);
        prop_assert!(r.rotations_used + 1 <= nonzero_diagonal(&a).max(1));
        prop_assert!(same_spectrum(&a, &r.transformed));
    }

    #[test]
    fn hollowise_leaves_hollow_input_alone(n in 2usize..=30, seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let mut a = random::gaussian(n, n, &mut rng);
        for i in 0..n {
            a[(i, i)] = 0.0;
        }
        let r = hollowise(&a, default_tol(n)).unwrap();
        prop_assert_eq!(r.rotations_used, 0);
        prop_assert_eq!(r.transformed, a);
    }

    #[test]
    fn givens_similarity_preserves_trace(n in 2usize..=20, k in 1usize..=30, seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let a = random::gaussian(n, n, &mut rng);
        let mut b = a.clone();
        for _ in 0..k {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            let (i, j) = (i.min(j), i.max(j));
            let t: f64 = rng.random_range(-3.0..3.0);
            b = apply_givens_similarity(&b, &GivensRotation::new(i, j, t.cos(), t.sin()).unwrap()).unwrap();
        }
        prop_assert!((b.trace() - a.trace()).abs() <= 8.0 * (k * n) as f64 * EPS * a.frobenius_norm());
    }

    #[test]
    fn pair_hollowise_invariants(n in 3usize..=40, seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let a = random::zero_trace(n, &mut rng);
        let b = random::zero_trace(n, &mut rng);
        let r = pair_hollowise(&a, &b, default_tol(n)).unwrap();
        let e = n as f64 * EPS;
        prop_assert!(max_abs_diagonal(&r.a_out) <= 1e3 * e * a.frobenius_norm());
        prop_assert!(almost_hollow_residual(&r.b_out) <= 1e3 * e * b.frobenius_norm());
        prop_assert!(r.q.orthogonality_residual() <= 1e2 * e);
        prop_assert!(r.quartics_solved <= n - 2);
        prop_assert!(same_spectrum(&a, &r.a_out));
        prop_assert!(same_spectrum(&b, &r.b_out));
        let ra = r.q.q().congruence(&a).unwrap();
        prop_assert!(ra.sub(&r.a_out).unwrap().frobenius_norm() <= 1e2 * e * a.frobenius_norm());
    }

    #[test]
    fn jnr_point_residuals(n in 3usize..=10, t in 0.01f64..0.99, seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let a = random::gaussian(n, n, &mut rng);
        let b = random::gaussian(n, n, &mut rng);
        let u = random::unit_vector(n, &mut rng);
        let v = random::unit_vector(n, &mut rng);
        let x = realize_jnr_point(&a, &b, &u, &v, t).unwrap();
        let c1 = (1.0 - t) * a.quadratic_form(&u) + t * a.quadratic_form(&v);
        let c2 = (1.0 - t) * b.quadratic_form(&u) + t * b.quadratic_form(&v);
        let bound = 1e3 * n as f64 * EPS * (a.frobenius_norm() + b.frobenius_norm());
        let norm2: f64 = x.iter().map(|z| z * z).sum();
        prop_assert!((norm2 - 1.0).abs() <= 1e2 * n as f64 * EPS);
        prop_assert!((a.quadratic_form(&x) - c1).abs() <= bound);
        prop_assert!((b.quadratic_form(&x) - c2).abs() <= bound);
    }

    #[test]
    fn symplectic_invariants(half in 1usize..=50, seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let n = 2 * half;
        let a = random::gaussian(n, n, &mut rng);
        let r = sympl_constant_diagonalise(&a).unwrap();
        let e = half as f64 * EPS;
        prop_assert!(r.diagonal_spread <= 1e3 * e * a.frobenius_norm());
        prop_assert!(symplectic_residual(r.u.q()).unwrap() <= 1e3 * e);
        prop_assert!(orthogonality_residual(r.u.q()).unwrap() <= 1e3 * e);
        prop_assert!(same_spectrum(&a, &r.transformed));
    }

    #[test]
    fn equalize_contract(half in 1usize..=20, seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let mut a = random::symmetric(2 * half, &mut rng);
        a = a.shift_diagonal(-a.trace() / (2 * half) as f64);
        let (out, _) = equalize_halves(&a).unwrap();
        let tol = 1e3 * half as f64 * EPS * a.frobenius_norm();
        let d = out.diagonal();
        for k in 0..half {
            prop_assert!((d[k] - d[k + half]).abs() <= tol);
        }
        let t1: f64 = d[..half].iter().sum();
        let t2: f64 = d[half..].iter().sum();
        prop_assert!(t1.abs() <= tol && t2.abs() <= tol);
    }

    #[test]
    fn four_by_four_routine(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let a = random::symmetric(4, &mut rng);
        let a = a.shift_diagonal(-a.trace() / 4.0);
        let r = sympl_hollowise_4x4(&a).unwrap();
        let recomputed = r.u.q().congruence(&a).unwrap();
        prop_assert!(max_abs_diagonal(&recomputed) <= 1e-12 * a.frobenius_norm());
        prop_assert!(diagonal_spread(&r.transformed) <= 1e-12 * a.frobenius_norm());
        prop_assert!(symplectic_residual(r.u.q()).unwrap() <= 1e-14);
    }
}
