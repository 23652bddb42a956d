//! Gain searches and stabilizing designs on the example systems.

use hollowise::fixtures;
use hollowise::matrix::DenseMatrix;
use hollowise::random;
use hollowise::spectrum::{eigenvalues, spectral_abscissa};
use hollowise::stabilize::{
    hamiltonian_residual, ms_stable, noise_gain_search, noise_stabilize, rotation_gain_search, rotation_stabilize,
    skew_residual, verify_block_hollow_pattern, GainSearch,
};
use hollowise::{Error, EPS};

#[test]
fn rotation_example_threshold_near_3_7() {
    let a = fixtures::rotation_a();
    let m = fixtures::rotation_m0_tilde();
    let r = rotation_gain_search(&a, &m, &GainSearch::default()).unwrap();
    assert!((r.mu - 3.7).abs() <= 0.2, "threshold {}", r.mu);
    let (lo, hi) = r.bracket;
    assert!(spectral_abscissa(&a.add(&m.scale(lo)).unwrap()).unwrap() >= 0.0);
    assert!(spectral_abscissa(&a.add(&m.scale(hi)).unwrap()).unwrap() < 0.0);
    assert!(hi - lo <= 1e-4 * hi);
}

#[test]
fn printed_noise_example_abscissae() {
    let m = fixtures::noise_m_printed();
    let a1 = fixtures::noise_a1();
    let a2 = fixtures::noise_a2();
    let cases = [(&a1, 5.0, -0.03), (&a2, 5.0, 0.25), (&a1, 20.0, -0.32), (&a2, 20.0, -0.29)];
    for (a, mu, expected) in cases {
        let (_, alpha) = ms_stable(a, &m, mu).unwrap();
        assert!((alpha - expected).abs() <= 0.02, "mu {mu}: {alpha} vs {expected}");
    }
    for mu in [7.5, 20.0] {
        assert!(ms_stable(&a1, &m, mu).unwrap().0 && ms_stable(&a2, &m, mu).unwrap().0, "mu {mu}");
    }
    let r = noise_gain_search(&[a1, a2], &m, &GainSearch::default()).unwrap();
    assert!(r.mu > 5.0 && r.mu < 7.5, "threshold {}", r.mu);
}

#[test]
fn own_noise_design_for_example_pair() {
    let systems = [fixtures::noise_a1(), fixtures::noise_a2()];
    let d = noise_stabilize(&systems, Some(&fixtures::NOISE_OMEGA), None, &GainSearch::default()).unwrap();
    assert_eq!(d.abscissae.len(), 2);
    assert!(d.abscissae.iter().all(|a| *a < 0.0), "{:?}", d.abscissae);
    for a in &systems {
        let (stable, alpha) = ms_stable(a, &d.m, d.mu).unwrap();
        assert!(stable && alpha < 0.0);
        assert!(verify_block_hollow_pattern(&d.transform, a, 1e-10).unwrap());
    }
    let n = 6.0;
    assert!(skew_residual(&d.m) <= 1e2 * n * EPS * d.m.frobenius_norm());
    // mu M is similar to mu M(omega): eigenvalues +-i mu omega_j.
    let mut got: Vec<f64> = eigenvalues(&d.m.scale(d.mu)).unwrap().eigenvalues.iter().map(|z| z.im).collect();
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut want: Vec<f64> = fixtures::NOISE_OMEGA.iter().flat_map(|w| [d.mu * w, -d.mu * w]).collect();
    want.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-8 * d.mu * 3.0, "{got:?} vs {want:?}");
    }
    // The bracket straddles the sign change of the worst abscissa.
    let worst = |mu: f64| systems.iter().map(|a| ms_stable(a, &d.m, mu).unwrap().1).fold(f64::MIN, f64::max);
    let (lo, hi) = d.bracket;
    if lo < hi {
        assert!(worst(lo) >= 0.0 && worst(hi) < 0.0);
    }
}

#[test]
fn single_system_odd_and_even() {
    let mut rng = random::rng(21);
    for n in [4usize, 5] {
        let a = random::zero_trace(n, &mut rng).shift_diagonal(-0.5);
        let d = noise_stabilize(std::slice::from_ref(&a), None, None, &GainSearch::default()).unwrap();
        assert!(d.abscissae[0] < 0.0);
        // M has a kernel exactly when n is odd.
        let zeros = eigenvalues(&d.m).unwrap().eigenvalues.iter().filter(|z| z.norm() < 1e-10).count();
        assert_eq!(zeros, n % 2);
    }
}

#[test]
fn supplied_transform_for_three_systems() {
    let mut rng = random::rng(4);
    let n = 5;
    let systems: Vec<DenseMatrix> = (0..3)
        .map(|_| {
            let mut a = random::gaussian(n, n, &mut rng);
            let d: [f64; 2] = [random::gaussian(1, 1, &mut rng)[(0, 0)], random::gaussian(1, 1, &mut rng)[(0, 0)]];
            let pattern = [d[0], -d[0], d[1], -d[1], 0.0];
            for i in 0..n {
                a[(i, i)] = pattern[i] - 0.3;
            }
            a
        })
        .collect();
    let u = DenseMatrix::identity(n);
    let d = noise_stabilize(&systems, None, Some(&u), &GainSearch::default()).unwrap();
    assert!(d.abscissae.iter().all(|a| *a < 0.0));
    assert_eq!(d.abscissae.len(), 3);

    let mut broken = systems.clone();
    broken[1][(0, 0)] += 0.5;
    broken[1][(4, 4)] -= 0.5;
    assert!(matches!(
        noise_stabilize(&broken, None, Some(&u), &GainSearch::default()),
        Err(Error::Precondition(_))
    ));
    assert!(noise_stabilize(&systems, None, None, &GainSearch::default()).is_err());
}

#[test]
fn random_rotation_designs() {
    let mut rng = random::rng(6);
    for _ in 0..5 {
        let a = random::zero_trace(6, &mut rng).shift_diagonal(-1.0 / 6.0);
        let d = rotation_stabilize(&a, None, &GainSearch::default()).unwrap();
        assert!(d.abscissae[0] < 0.0);
        assert!(d.hamiltonian);
        assert!(hamiltonian_residual(&d.m).unwrap() <= 1e-12);
        assert!(skew_residual(&d.m) <= 1e2 * 6.0 * EPS * d.m.frobenius_norm());
        assert!(spectral_abscissa(&a.add(&d.m.scale(d.mu)).unwrap()).unwrap() < 0.0);
    }
}

#[test]
fn error_paths() {
    let a = DenseMatrix::from_diagonal(&[1.0, 1.0, 1.0, -2.0]);
    assert!(matches!(rotation_stabilize(&a, None, &GainSearch::default()), Err(Error::Precondition(_))));
    let a = fixtures::rotation_a();
    assert!(rotation_stabilize(&a, Some(&[1.0, -1.0]), &GainSearch::default()).is_err());
    let tight = GainSearch { mu_max: 2.0, refine_rel: 1e-4 };
    assert!(matches!(
        rotation_gain_search(&a, &fixtures::rotation_m0_tilde(), &tight),
        Err(Error::NoStableGain { .. })
    ));
    let d = rotation_stabilize(&DenseMatrix::identity(4).scale(-1.0), None, &GainSearch::default()).unwrap();
    assert_eq!(d.mu, 1.0);
}
