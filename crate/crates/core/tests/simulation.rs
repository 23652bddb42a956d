//! Statistical and convergence checks of the simulators.

use hollowise::fixtures;
use hollowise::matrix::DenseMatrix;
use hollowise::sdesim::{euler_maruyama, simulate_servo, InitialState, SdeConfig};

fn config(a: DenseMatrix, m: DenseMatrix, mu: f64, dt: f64, t_end: f64, n_paths: usize) -> SdeConfig {
    SdeConfig {
        a,
        m,
        mu,
        dt,
        t_end,
        n_paths,
        seed: 2024,
        x0: InitialState::RandomUnit,
        record_every: None,
    }
}

fn final_squares(cfg: &SdeConfig) -> (f64, f64) {
    let e = euler_maruyama(cfg).unwrap();
    let sq: Vec<f64> = e.norms.iter().map(|p| p.last().unwrap().powi(2)).collect();
    let n = sq.len() as f64;
    let mean = sq.iter().sum::<f64>() / n;
    let var = sq.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((mean - e.mean_square.last().unwrap()).abs() <= 1e-12 * mean);
    (mean, var / n)
}

#[test]
fn deterministic_mean_square_matches_matrix_exponential() {
    let a = DenseMatrix::from_rows(&[[-1.0, 3.0], [0.0, -2.0]]).unwrap();
    let t_end = 1.0;
    let cfg = config(a.clone(), DenseMatrix::zeros(2, 2), 0.0, 1e-4, t_end, 2000);
    let (mean, se2) = final_squares(&cfg);
    // For x0 uniform on the sphere, E|e^{At} x0|^2 = ||e^{At}||_F^2 / n.
    let e = (a.to_nalgebra() * t_end).exp();
    let expected = e.norm_squared() / 2.0;
    assert!((mean - expected).abs() <= 3.0 * se2.sqrt(), "{mean} vs {expected} (se {})", se2.sqrt());
}

#[test]
fn halving_dt_is_within_monte_carlo_noise() {
    let a = DenseMatrix::from_rows(&[[-1.0, 3.0], [0.0, -2.0]]).unwrap();
    let m = DenseMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
    let coarse = config(a.clone(), m.clone(), 1.5, 1e-3, 1.0, 2000);
    let mut fine = config(a, m, 1.5, 5e-4, 1.0, 2000);
    fine.seed = 99;
    let (m1, s1) = final_squares(&coarse);
    let (m2, s2) = final_squares(&fine);
    assert!((m1 - m2).abs() <= 3.0 * (s1 + s2).sqrt(), "{m1} vs {m2}");
}

#[test]
fn ensembles_are_reproducible_and_prefix_stable() {
    let cfg = config(fixtures::noise_a2(), fixtures::noise_m_printed(), 20.0, 1e-4, 0.2, 6);
    let a = euler_maruyama(&cfg).unwrap();
    let b = euler_maruyama(&cfg).unwrap();
    assert_eq!(a, b);
    let mut fewer = cfg.clone();
    fewer.n_paths = 3;
    let c = euler_maruyama(&fewer).unwrap();
    assert_eq!(c.norms[..], a.norms[..3]);
    assert_eq!(c.seeds[..], a.seeds[..3]);
}

#[test]
fn example_ensembles_have_the_expected_trend() {
    let stable = config(fixtures::noise_a2(), fixtures::noise_m_printed(), 20.0, 1e-4, 5.0, 20);
    assert!(euler_maruyama(&stable).unwrap().log_slope(0.5).unwrap() < 0.0);
}

fn servo_final(dt: f64) -> (Vec<f64>, f64) {
    let a = DenseMatrix::from_rows(&[[0.3, 1.0, 0.0], [-1.0, -0.5, 0.2], [0.0, 0.4, -1.0]]).unwrap();
    let m0 = DenseMatrix::from_rows(&[[0.0, 1.0, -0.5], [-1.0, 0.0, 2.0], [0.5, -2.0, 0.0]]).unwrap();
    let t = simulate_servo(&a, &m0, &[1.0, 0.5, -0.5], 0.0, 2.0, dt, None).unwrap();
    (t.final_x, *t.mu.last().unwrap())
}

#[test]
fn servo_integrator_is_fourth_order() {
    let (x_ref, mu_ref) = servo_final(1e-4);
    let err = |dt: f64| {
        let (x, mu) = servo_final(dt);
        x.iter().zip(&x_ref).map(|(a, b)| (a - b).abs()).fold((mu - mu_ref).abs(), f64::max)
    };
    let ratio = err(0.04) / err(0.02);
    assert!((8.0..=32.0).contains(&ratio), "error ratio {ratio}");
}

#[test]
fn servo_levels_off_for_hurwitz_system() {
    let a = DenseMatrix::from_rows(&[[-1.0, 0.5], [0.0, -2.0]]).unwrap();
    let m0 = DenseMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
    let t = simulate_servo(&a, &m0, &[0.1, 0.1], 0.0, 30.0, 1e-3, Some(100)).unwrap();
    assert!(!t.diverged);
    let k = t.mu.len();
    let rate = (t.mu[k - 1] - t.mu[k - 11]) / (t.times[k - 1] - t.times[k - 11]);
    assert!(rate.abs() <= 1e-6, "mu still moving at {rate}");
    assert!(t.mu[k - 1] < 1.0);
}
