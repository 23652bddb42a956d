use std::path::{Path, PathBuf};

use hollowise::hollow::{constant_diagonalise, default_tol, hollowise as hollowise_matrix};
use hollowise::matrix::{almost_hollow_residual, diagonal_spread, max_abs_diagonal, DenseMatrix};
use hollowise::pairhollow::pair_hollowise;
use hollowise::rotation::orthogonality_residual;
use hollowise::sdesim::{euler_maruyama, log_slope, simulate_servo, InitialState, SdeConfig};
use hollowise::spectrum::spectral_abscissa;
use hollowise::stabilize::{
    hamiltonian_residual, ms_stable, noise_gain_search, noise_stabilize, rotation_gain_search, rotation_stabilize,
    skew_residual, GainSearch,
};
use hollowise::sympl::{sympl_constant_diagonalise, symplectic_residual};
use hollowise::{fixtures, io};
use serde::Serialize;

use crate::report::{ensure_dir, RunReport};
use crate::{
    CliError, CliResult, FixtureArgs, FixtureFormat, HollowiseArgs, PairArgs, SimulateArgs, StabilizeArgs,
    StabilizeMode, SymplecticArgs,
};

/// `||Q^T A Q - T||_F / max(||A||_F, 1)`.
fn consistency(q: &DenseMatrix, a: &DenseMatrix, t: &DenseMatrix) -> CliResult<f64> {
    Ok(q.congruence(a)?.sub(t)?.frobenius_norm() / a.frobenius_norm().max(1.0))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}{suffix}.{ext}"),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

pub(crate) fn hollowise(args: &HollowiseArgs) -> CliResult<RunReport> {
    let mut rep = RunReport::new("hollowise");
    let a = rep.input("input", &args.input)?;
    let n = a.square_dim()?;
    let r = if args.constant_diagonal {
        constant_diagonalise(&a)?
    } else {
        hollowise_matrix(&a, args.tol.unwrap_or_else(|| default_tol(n)))?
    };
    if let Some(dir) = args.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    let t = rep.output_matrix(args.output.clone(), &r.transformed)?;
    let q = rep.output_matrix(sibling(&args.output, "_q"), r.q.q())?;
    if args.constant_diagonal {
        rep.residual("diagonal_spread", diagonal_spread(&t));
    } else {
        rep.residual("max_abs_diagonal", max_abs_diagonal(&t));
    }
    rep.residual("orthogonality", orthogonality_residual(&q)?);
    rep.residual("consistency", consistency(&q, &a, &t)?);
    rep.detail("n", n);
    rep.detail("rotations_used", r.rotations_used);
    Ok(rep)
}

pub(crate) fn pair(args: &PairArgs) -> CliResult<RunReport> {
    let mut rep = RunReport::new("pair");
    let mut a = rep.input("a", &args.a)?;
    let mut b = rep.input("b", &args.b)?;
    let n = a.square_dim()?;
    if args.shift_trace {
        rep.detail("shifts", [a.trace() / n as f64, b.trace() / b.square_dim()? as f64]);
        a = a.shift_diagonal(-a.trace() / n as f64);
        b = b.shift_diagonal(-b.trace() / n as f64);
    }
    let r = pair_hollowise(&a, &b, args.tol.unwrap_or_else(|| default_tol(n)))?;
    ensure_dir(&args.output_dir)?;
    let q = rep.output_matrix(args.output_dir.join("q.txt"), r.q.q())?;
    let a_out = rep.output_matrix(args.output_dir.join("a_out.txt"), &r.a_out)?;
    let b_out = rep.output_matrix(args.output_dir.join("b_out.txt"), &r.b_out)?;
    rep.residual("a_max_abs_diagonal", max_abs_diagonal(&a_out));
    rep.residual("b_almost_hollow", almost_hollow_residual(&b_out));
    rep.residual("orthogonality", orthogonality_residual(&q)?);
    rep.residual("consistency_a", consistency(&q, &a, &a_out)?);
    rep.residual("consistency_b", consistency(&q, &b, &b_out)?);
    rep.detail("n", n);
    rep.detail("quartics_solved", r.quartics_solved);
    Ok(rep)
}

pub(crate) fn symplectic(args: &SymplecticArgs) -> CliResult<RunReport> {
    let mut rep = RunReport::new("symplectic");
    let a = rep.input("input", &args.input)?;
    let r = sympl_constant_diagonalise(&a)?;
    ensure_dir(&args.output_dir)?;
    let u = rep.output_matrix(args.output_dir.join("u.txt"), r.u.q())?;
    let t = rep.output_matrix(args.output_dir.join("transformed.txt"), &r.transformed)?;
    rep.residual("diagonal_spread", diagonal_spread(&t));
    rep.residual("symplectic", symplectic_residual(&u)?);
    rep.residual("orthogonality", orthogonality_residual(&u)?);
    rep.residual("consistency", consistency(&u, &a, &t)?);
    rep.detail("diagonal", a.trace() / a.rows() as f64);
    rep.detail("factors", r.u.factors().len());
    Ok(rep)
}

#[derive(Serialize)]
struct ProbeRow {
    mu: f64,
    abscissae: Vec<f64>,
}

pub(crate) fn stabilize(args: &StabilizeArgs) -> CliResult<RunReport> {
    let mut rep = RunReport::new("stabilize");
    let a = rep.input("a", &args.a)?;
    let mut systems = vec![a];
    if let Some(b) = &args.b {
        if args.mode == StabilizeMode::Rotation {
            return Err(CliError::Usage("--b only applies to noise mode".into()));
        }
        systems.push(rep.input("b", b)?);
    }
    let opts = GainSearch {
        mu_max: args.mu_max,
        refine_rel: args.refine_rel,
    };
    let fixed = match &args.m_fixed {
        Some(p) => Some(rep.input("m_fixed", p)?),
        None => None,
    };

    let (m, mu, bracket, grid, transform) = match (args.mode, fixed) {
        (StabilizeMode::Rotation, Some(m)) => {
            let r = rotation_gain_search(&systems[0], &m, &opts)?;
            (m, r.mu, r.bracket, r.grid, None)
        }
        (StabilizeMode::Noise, Some(m)) => {
            let r = noise_gain_search(&systems, &m, &opts)?;
            (m, r.mu, r.bracket, r.grid, None)
        }
        (StabilizeMode::Rotation, None) => {
            let d = rotation_stabilize(&systems[0], args.lambda.as_deref(), &opts)?;
            (d.m, d.mu, d.bracket, d.grid, Some(d.transform))
        }
        (StabilizeMode::Noise, None) => {
            let d = noise_stabilize(&systems, args.omega.as_deref(), None, &opts)?;
            (d.m, d.mu, d.bracket, d.grid, Some(d.transform))
        }
    };

    ensure_dir(&args.output_dir)?;
    let m = rep.output_matrix(args.output_dir.join("m.txt"), &m)?;
    if let Some(u) = transform {
        let u = rep.output_matrix(args.output_dir.join("transform.txt"), &u)?;
        rep.residual("transform_orthogonality", orthogonality_residual(&u)?);
    }
    let abscissae = |mu: f64| -> CliResult<Vec<f64>> {
        match args.mode {
            StabilizeMode::Rotation => Ok(vec![spectral_abscissa(&systems[0].add(&m.scale(mu))?)?]),
            StabilizeMode::Noise => systems
                .iter()
                .map(|s| Ok(ms_stable(s, &m, mu)?.1))
                .collect(),
        }
    };
    for (j, alpha) in abscissae(mu)?.into_iter().enumerate() {
        rep.residual(&format!("abscissa_{j}"), alpha);
    }
    rep.residual("skew", skew_residual(&m));
    if args.mode == StabilizeMode::Rotation {
        rep.residual("hamiltonian", hamiltonian_residual(&m)?);
    }
    let table = args
        .probe_mu
        .iter()
        .map(|&mu| Ok(ProbeRow { mu, abscissae: abscissae(mu)? }))
        .collect::<CliResult<Vec<_>>>()?;
    rep.detail("mode", format!("{:?}", args.mode).to_lowercase());
    rep.detail("mu", mu);
    rep.detail("bracket", bracket);
    rep.detail("grid", grid);
    rep.detail("probes", table);
    Ok(rep)
}

/// Columns `t` and the last one of a CSV written by the simulators.
fn read_csv_columns(path: &Path, col: usize) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut t = Vec::new();
    let mut v = Vec::new();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| hollowise::Error::Parse(format!("{}: bad number {s:?}", path.display())))
        };
        t.push(parse(fields[0])?);
        let k = if col == usize::MAX { fields.len() - 1 } else { col };
        v.push(parse(fields[k])?);
    }
    Ok((t, v))
}

pub(crate) fn simulate(args: &SimulateArgs) -> CliResult<RunReport> {
    let mut rep = RunReport::new("simulate");
    let a = rep.input("a", &args.a)?;
    let m = rep.input("m", &args.m)?;
    ensure_dir(&args.output_dir)?;
    if args.servo {
        let x0 = args.x0.clone().unwrap_or_else(|| vec![1.0; a.rows()]);
        let tr = simulate_servo(&a, &m, &x0, args.mu, args.t_end, args.dt, args.record_every)?;
        let mut csv = String::from("t,x_norm,mu\n");
        for k in 0..tr.times.len() {
            csv.push_str(&format!("{},{},{}\n", tr.times[k], tr.x_norm[k], tr.mu[k]));
        }
        let path = args.output_dir.join("servo.csv");
        rep.output_file(path.clone(), &csv)?;
        let (_, mus) = read_csv_columns(&path, 2)?;
        let (_, norms) = read_csv_columns(&path, 1)?;
        rep.residual("final_mu", *mus.last().expect("nonempty trajectory"));
        rep.residual("final_x_norm", *norms.last().expect("nonempty trajectory"));
        rep.detail("diverged", tr.diverged);
        rep.detail("ln_one_plus_final_mu", mus.last().map(|m| m.ln_1p()));
        return Ok(rep);
    }

    let cfg = SdeConfig {
        a,
        m,
        mu: args.mu,
        dt: args.dt,
        t_end: args.t_end,
        n_paths: args.paths,
        seed: args.seed,
        x0: args.x0.clone().map_or(InitialState::RandomUnit, InitialState::Fixed),
        record_every: args.record_every,
    };
    let e = euler_maruyama(&cfg)?;
    let csv = args.output_dir.join("ensemble.csv");
    e.write_csv(&csv)?;
    rep.outputs.push(csv.clone());
    let meta = args.output_dir.join("ensemble.json");
    e.write_metadata(&meta)?;
    rep.outputs.push(meta);
    let (t, ms) = read_csv_columns(&csv, usize::MAX)?;
    match log_slope(&t, &ms, args.window) {
        Ok(s) => rep.residual("log_slope", s),
        Err(err) => rep.detail("log_slope_error", err.to_string()),
    }
    if let Some(last) = ms.last().filter(|v| v.is_finite()) {
        rep.residual("final_mean_square", *last);
    }
    rep.detail("diverged_paths", e.metadata.diverged);
    rep.detail("metadata", &e.metadata);
    Ok(rep)
}

pub(crate) fn fixture(args: &FixtureArgs) -> CliResult<RunReport> {
    let mut rep = RunReport::new("fixture");
    let chosen = match &args.name {
        Some(name) => vec![fixtures::by_name(name)
            .ok_or_else(|| CliError::Usage(format!("unknown fixture {name:?}")))?],
        None => fixtures::all(),
    };
    ensure_dir(&args.output_dir)?;
    for f in chosen {
        let (path, body) = match args.format {
            FixtureFormat::Text => (
                args.output_dir.join(format!("{}.txt", f.name)),
                format!("# {}: {}\n{}", f.name, f.note, io::format_text(&f.matrix)),
            ),
            FixtureFormat::Json => (args.output_dir.join(format!("{}.json", f.name)), io::format_json(&f.matrix)),
        };
        rep.output_file(path.clone(), &body)?;
        let back = io::read_matrix(&path)?;
        rep.residual(f.name, back.sub(&f.matrix)?.max_abs());
    }
    Ok(rep)
}
