use std::time::Instant;

use hollowise::hollow::default_tol;
use hollowise::matrix::{almost_hollow_residual, max_abs_diagonal};
use hollowise::pairhollow::pair_hollowise;
use hollowise::random;
use hollowise::sympl::sympl_constant_diagonalise;
use hollowise::EPS;
use serde::{Deserialize, Serialize};

use crate::report::RunReport;
use crate::{BenchAlgo, BenchArgs, CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

/// Least-squares slope of `ln(median)` against `ln(n)`; `None` for fewer than two rows.
pub fn loglog_slope(rows: &[BenchRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), r.median_ms.max(1e-9).ln()))
        .collect();
    let m = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    Some(sxy / sxx)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

pub(crate) fn run(args: &BenchArgs) -> CliResult<RunReport> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    for &n in &args.sizes {
        let ok = match args.algo {
            BenchAlgo::Pair => n >= 3,
            BenchAlgo::Symplectic => n >= 2 && n % 2 == 0,
        };
        if !ok {
            return Err(CliError::Usage(format!("size {n} is not valid for {:?}", args.algo)));
        }
    }

    let mut rng = random::rng(args.seed);
    let mut rows = Vec::new();
    // Worst residual relative to n eps ||A||_F, as a sanity check on the timed runs.
    let mut worst = 0.0f64;
    for &n in &args.sizes {
        let mut times = Vec::with_capacity(args.trials);
        for _ in 0..args.trials {
            match args.algo {
                BenchAlgo::Pair => {
                    let a = random::zero_trace(n, &mut rng);
                    let b = random::zero_trace(n, &mut rng);
                    let start = Instant::now();
                    let r = pair_hollowise(&a, &b, default_tol(n))?;
                    times.push(start.elapsed().as_secs_f64() * 1e3);
                    let e = n as f64 * EPS;
                    worst = worst
                        .max(max_abs_diagonal(&r.a_out) / (e * a.frobenius_norm()))
                        .max(almost_hollow_residual(&r.b_out) / (e * b.frobenius_norm()));
                }
                BenchAlgo::Symplectic => {
                    let a = random::gaussian(n, n, &mut rng);
                    let start = Instant::now();
                    let r = sympl_constant_diagonalise(&a)?;
                    times.push(start.elapsed().as_secs_f64() * 1e3);
                    worst = worst.max(r.diagonal_spread / ((n / 2) as f64 * EPS * a.frobenius_norm()));
                }
            }
        }
        let (lo, hi) = times.iter().fold((f64::INFINITY, 0.0f64), |(l, h), t| (l.min(*t), h.max(*t)));
        rows.push(BenchRow {
            n,
            median_ms: median(&mut times),
            min_ms: lo,
            max_ms: hi,
        });
    }

    eprintln!("{:>8} {:>14} {:>14} {:>14}", "n", "median [ms]", "min [ms]", "max [ms]");
    for r in &rows {
        eprintln!("{:>8} {:>14.3} {:>14.3} {:>14.3}", r.n, r.median_ms, r.min_ms, r.max_ms);
    }
    let slope = loglog_slope(&rows);
    if let Some(s) = slope {
        eprintln!("log-log slope {s:.3}");
    }

    let mut rep = RunReport::new("bench");
    rep.residual("worst_relative_residual", worst);
    rep.detail("algo", format!("{:?}", args.algo).to_lowercase());
    rep.detail("trials", args.trials);
    rep.detail("seed", args.seed);
    rep.detail("rows", &rows);
    rep.detail("loglog_slope", slope);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, t: f64) -> BenchRow {
        BenchRow {
            n,
            median_ms: t,
            min_ms: t,
            max_ms: t,
        }
    }

    #[test]
    fn slope_of_power_law() {
        let rows: Vec<BenchRow> = [100, 200, 400].iter().map(|&n| row(n, (n as f64).powi(2) * 1e-3)).collect();
        assert!((loglog_slope(&rows).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&rows[..1]).is_none());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
