//! Monte Carlo for `dx = A x dt + mu M x dw` (Stratonovich, integrated in
//! its Ito form) and the deterministic adaptive-gain rotation servo.
//!
//! Path `i` draws from `ChaCha8Rng::seed_from_u64(seed ^ i)`, so a path does
//! not depend on how many other paths run or on the thread schedule.

use std::io::Write as _;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Norms above this freeze a path and mark it diverged.
pub const DIVERGENCE_NORM: f64 = 1e150;

pub const GENERATOR: &str = "rand_chacha 0.9 ChaCha8Rng, seed_from_u64(seed ^ path_index)";
pub const NORMAL_METHOD: &str = "rand_distr 0.5 StandardNormal (ziggurat), scaled by sqrt(dt)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    Fixed(Vec<f64>),
    /// Uniform on the unit sphere, drawn from the path's own generator.
    RandomUnit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdeConfig {
    pub a: DenseMatrix,
    pub m: DenseMatrix,
    pub mu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub x0: InitialState,
    /// Record every k-th step; `None` keeps about 1000 samples.
    pub record_every: Option<usize>,
}

impl SdeConfig {
    pub fn validate(&self) -> Result<usize> {
        let n = self.a.square_dim()?;
        if self.m.square_dim()? != n {
            return Err(Error::DimensionMismatch("A and M differ in size".into()));
        }
        self.a.check_finite()?;
        self.m.check_finite()?;
        if !(self.dt > 0.0) || !(self.t_end > 0.0) || self.dt > self.t_end || !self.mu.is_finite() {
            return Err(Error::Precondition(format!(
                "need 0 < dt <= t_end and finite mu (dt = {}, t_end = {}, mu = {})",
                self.dt, self.t_end, self.mu
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::Precondition("n_paths must be at least 1".into()));
        }
        if let InitialState::Fixed(x) = &self.x0 {
            if x.len() != n || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Precondition(format!("initial state must be {n} finite numbers")));
            }
        }
        if self.record_every == Some(0) {
            return Err(Error::Precondition("record_every must be positive".into()));
        }
        Ok(n)
    }

    fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }

    fn stride(&self) -> usize {
        self.record_every.unwrap_or_else(|| (self.steps() / 1000).max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMetadata {
    pub generator: String,
    pub normal_method: String,
    pub seed: u64,
    pub dt: f64,
    pub t_end: f64,
    pub mu: f64,
    pub steps: usize,
    pub record_every: usize,
    pub n_paths: usize,
    pub diverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePathEnsemble {
    pub times: Vec<f64>,
    /// `norms[p][k]` is `|x_p(times[k])|`.
    pub norms: Vec<Vec<f64>>,
    /// Average of `norms[p][k]^2` over the paths that never diverged.
    pub mean_square: Vec<f64>,
    pub seeds: Vec<u64>,
    pub diverged: Vec<bool>,
    pub metadata: EnsembleMetadata,
}

/// Sum with pairwise splitting; the result depends only on the order of `v`.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn initial_state(x0: &InitialState, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match x0 {
        InitialState::Fixed(x) => x.clone(),
        InitialState::RandomUnit => loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let r = norm(&v);
            if r > 0.0 {
                break v.into_iter().map(|x| x / r).collect();
            }
        },
    }
}

/// Euler-Maruyama: `x += (A + (mu M)^2 / 2) x dt + (mu M) x dW`.
pub fn euler_maruyama(cfg: &SdeConfig) -> Result<SamplePathEnsemble> {
    let n = cfg.validate()?;
    let g = cfg.m.scale(cfg.mu);
    let drift = cfg.a.add(&g.matmul(&g)?.scale(0.5))?;
    let steps = cfg.steps();
    let stride = cfg.stride();
    let sqrt_dt = cfg.dt.sqrt();
    let samples = steps / stride + 1;
    let times: Vec<f64> = (0..samples).map(|k| (k * stride) as f64 * cfg.dt).collect();
    let seeds: Vec<u64> = (0..cfg.n_paths as u64).map(|i| cfg.seed ^ i).collect();

    let paths: Vec<(Vec<f64>, bool)> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut x = initial_state(&cfg.x0, n, &mut rng);
            let mut norms = Vec::with_capacity(samples);
            norms.push(norm(&x));
            let mut diverged = false;
            let mut dx = vec![0.0; n];
            for step in 1..=steps {
                if !diverged {
                    let dw: f64 = sqrt_dt * rng.sample::<f64, _>(StandardNormal);
                    for i in 0..n {
                        let (dr, gr) = (drift.row(i), g.row(i));
                        let mut acc = 0.0;
                        for j in 0..n {
                            acc += (dr[j] * cfg.dt + gr[j] * dw) * x[j];
                        }
                        dx[i] = acc;
                    }
                    for i in 0..n {
                        x[i] += dx[i];
                    }
                    let r = norm(&x);
                    if !(r <= DIVERGENCE_NORM) {
                        diverged = true;
                    }
                }
                if step % stride == 0 {
                    norms.push(if diverged { DIVERGENCE_NORM } else { norm(&x) });
                }
            }
            (norms, diverged)
        })
        .collect();

    let diverged: Vec<bool> = paths.iter().map(|p| p.1).collect();
    let norms: Vec<Vec<f64>> = paths.into_iter().map(|p| p.0).collect();
    let alive: Vec<usize> = (0..cfg.n_paths).filter(|&p| !diverged[p]).collect();
    let mean_square: Vec<f64> = (0..samples)
        .map(|k| {
            if alive.is_empty() {
                return f64::NAN;
            }
            let sq: Vec<f64> = alive.iter().map(|&p| norms[p][k] * norms[p][k]).collect();
            pairwise_sum(&sq) / alive.len() as f64
        })
        .collect();
    let n_diverged = diverged.iter().filter(|d| **d).count();
    Ok(SamplePathEnsemble {
        times,
        norms,
        mean_square,
        seeds,
        diverged,
        metadata: EnsembleMetadata {
            generator: GENERATOR.into(),
            normal_method: NORMAL_METHOD.into(),
            seed: cfg.seed,
            dt: cfg.dt,
            t_end: cfg.t_end,
            mu: cfg.mu,
            steps,
            record_every: stride,
            n_paths: cfg.n_paths,
            diverged: n_diverged,
        },
    })
}

impl SamplePathEnsemble {
    /// CSV with header `t,path_0,...,path_{N-1},mean_square`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for p in 0..self.norms.len() {
            s.push_str(&format!(",path_{p}"));
        }
        s.push_str(",mean_square\n");
        for (k, t) in self.times.iter().enumerate() {
            s.push_str(&t.to_string());
            for p in &self.norms {
                s.push(',');
                s.push_str(&p[k].to_string());
            }
            s.push(',');
            s.push_str(&self.mean_square[k].to_string());
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_csv().as_bytes())
    }

    pub fn write_metadata(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.metadata).map_err(|e| Error::Parse(e.to_string()))?;
        write_file(path, json.as_bytes())
    }

    pub fn log_slope(&self, window: f64) -> Result<f64> {
        log_slope(&self.times, &self.mean_square, window)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Least-squares slope of `ln(values)` against `times` over the trailing
/// fraction `window` of the samples.
pub fn log_slope(times: &[f64], values: &[f64], window: f64) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch("times and values differ in length".into()));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::Precondition(format!("window {window} is not in (0, 1]")));
    }
    let count = ((times.len() as f64 * window).ceil() as usize).min(times.len());
    if count < 2 {
        return Err(Error::Precondition("window holds fewer than two samples".into()));
    }
    let start = times.len() - count;
    let (t, v) = (&times[start..], &values[start..]);
    if v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::Precondition("non-positive or non-finite value in window".into()));
    }
    let m = count as f64;
    let tm = t.iter().sum::<f64>() / m;
    let ym = v.iter().map(|x| x.ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (ti, vi) in t.iter().zip(v) {
        sxy += (ti - tm) * (vi.ln() - ym);
        sxx += (ti - tm) * (ti - tm);
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServoTrajectory {
    pub times: Vec<f64>,
    pub x_norm: Vec<f64>,
    pub mu: Vec<f64>,
    pub final_x: Vec<f64>,
    pub diverged: bool,
}

/// Classical RK4 for `x' = (A + mu M0) x`, `mu' = |x|` with fixed step `dt`.
pub fn simulate_servo(
    a: &DenseMatrix,
    m0: &DenseMatrix,
    x0: &[f64],
    mu0: f64,
    t_end: f64,
    dt: f64,
    record_every: Option<usize>,
) -> Result<ServoTrajectory> {
    let n = a.square_dim()?;
    if m0.square_dim()? != n || x0.len() != n {
        return Err(Error::DimensionMismatch("A, M0 and x0 must agree in size".into()));
    }
    a.check_finite()?;
    m0.check_finite()?;
    if m0.add(&m0.transpose())?.frobenius_norm() > 1e-10 * m0.frobenius_norm().max(1.0) {
        return Err(Error::Precondition("M0 is not skew-symmetric".into()));
    }
    if !(dt > 0.0) || !(t_end > 0.0) || dt > t_end || !mu0.is_finite() {
        return Err(Error::Precondition("need 0 < dt <= t_end and finite mu0".into()));
    }
    if record_every == Some(0) {
        return Err(Error::Precondition("record_every must be positive".into()));
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let stride = record_every.unwrap_or((steps / 1000).max(1));

    let rhs = |x: &[f64], mu: f64| -> (Vec<f64>, f64) {
        let ax = a.matvec(x);
        let mx = m0.matvec(x);
        ((0..n).map(|i| ax[i] + mu * mx[i]).collect(), norm(x))
    };
    let axpy = |x: &[f64], h: f64, k: &[f64]| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + h * b).collect() };

    let mut x = x0.to_vec();
    let mut mu = mu0;
    let mut out = ServoTrajectory {
        times: vec![0.0],
        x_norm: vec![norm(&x)],
        mu: vec![mu],
        final_x: Vec::new(),
        diverged: false,
    };
    for step in 1..=steps {
        let (k1, m1) = rhs(&x, mu);
        let (k2, m2) = rhs(&axpy(&x, 0.5 * dt, &k1), mu + 0.5 * dt * m1);
        let (k3, m3) = rhs(&axpy(&x, 0.5 * dt, &k2), mu + 0.5 * dt * m2);
        let (k4, m4) = rhs(&axpy(&x, dt, &k3), mu + dt * m3);
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        mu += dt / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
        let r = norm(&x);
        if !(r <= DIVERGENCE_NORM) || !mu.is_finite() {
            out.diverged = true;
        }
        if step % stride == 0 || step == steps || out.diverged {
            out.times.push(step as f64 * dt);
            out.x_norm.push(r);
            out.mu.push(mu);
        }
        if out.diverged {
            break;
        }
    }
    out.final_x = x;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(a: DenseMatrix, m: DenseMatrix, mu: f64) -> SdeConfig {
        SdeConfig {
            a,
            m,
            mu,
            dt: 1e-3,
            t_end: 1.0,
            n_paths: 4,
            seed: 7,
            x0: InitialState::Fixed(vec![1.0, 0.0]),
            record_every: Some(100),
        }
    }

    #[test]
    fn deterministic_decay() {
        let cfg = config(DenseMatrix::identity(2).scale(-1.0), DenseMatrix::zeros(2, 2), 0.0);
        let e = euler_maruyama(&cfg).unwrap();
        let last = *e.norms[0].last().unwrap();
        assert!((last - (-1.0f64).exp()).abs() < 1e-3, "{last}");
        assert_eq!(e.times.len(), 11);
        assert!((e.mean_square[10] - last * last).abs() < 1e-15);
    }

    #[test]
    fn reproducible_and_prefix_stable() {
        let m = DenseMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        let a = DenseMatrix::from_rows(&[[0.1, 1.0], [0.0, -0.5]]).unwrap();
        let mut cfg = config(a, m, 2.0);
        cfg.x0 = InitialState::RandomUnit;
        let e1 = euler_maruyama(&cfg).unwrap();
        let e2 = euler_maruyama(&cfg).unwrap();
        assert_eq!(e1, e2);
        cfg.n_paths = 2;
        let e3 = euler_maruyama(&cfg).unwrap();
        assert_eq!(e3.norms[..], e1.norms[..2]);
    }

    #[test]
    fn divergence_is_flagged() {
        let mut cfg = config(DenseMatrix::identity(2).scale(400.0), DenseMatrix::zeros(2, 2), 0.0);
        cfg.t_end = 2.0;
        let e = euler_maruyama(&cfg).unwrap();
        assert!(e.diverged.iter().all(|d| *d));
        assert_eq!(e.metadata.diverged, 4);
        assert!(e.mean_square.iter().all(|v| v.is_nan()));
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = config(DenseMatrix::zeros(2, 2), DenseMatrix::zeros(2, 2), 1.0);
        cfg.n_paths = 0;
        assert!(euler_maruyama(&cfg).is_err());
        cfg.n_paths = 1;
        cfg.dt = 2.0;
        assert!(euler_maruyama(&cfg).is_err());
    }

    #[test]
    fn log_slope_examples() {
        let t: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let v: Vec<f64> = t.iter().map(|t| (-2.0 * t).exp()).collect();
        assert!((log_slope(&t, &v, 1.0).unwrap() + 2.0).abs() < 1e-12);
        assert!(log_slope(&t, &vec![3.0; 50], 0.5).unwrap().abs() < 1e-15);
        assert!(log_slope(&t, &vec![0.0; 50], 0.5).is_err());
    }

    #[test]
    fn csv_layout() {
        let cfg = config(DenseMatrix::identity(2).scale(-1.0), DenseMatrix::zeros(2, 2), 0.0);
        let csv = euler_maruyama(&cfg).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,path_0,path_1,path_2,path_3,mean_square");
        assert_eq!(lines.count(), 11);
    }

    #[test]
    fn servo_without_rotation_grows() {
        let a = DenseMatrix::from_diagonal(&[1.0, -2.0]);
        let r = simulate_servo(&a, &DenseMatrix::zeros(2, 2), &[1.0, 1.0], 0.0, 5.0, 1e-3, None).unwrap();
        assert!(r.x_norm.last().unwrap() > &100.0);
        assert!(r.mu.windows(2).all(|w| w[1] >= w[0]));
    }
}
