//! Command-line front end: four subcommands over run files.
//!
//! `simulate` integrates and writes trajectory tables, `spectrum` computes
//! the dominant eigenpair, `check` runs seeded conservation / positivity /
//! dissipativity sweeps with PASS/FAIL verdicts, and `aeg` combines a run
//! with the eigenpair into the shape-convergence distance series. Exit codes:
//! 0 success (all checks pass), 1 runtime failure or failed check, 2 usage.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{parse_config, RunConfig};
use crate::error::{Error, Result};
use crate::evolution::{simulate, step_count, step_warnings, Scheme};
use crate::generator::GeneratorMatrix;
use crate::output::{write_outputs, OutputBundle};
use crate::resolvent::dissipativity_check;
use crate::sampling::{positivity_safe_dt, random_nonnegative_state};
use crate::spectral::{aeg_diagnostic, spectral_bound};

#[derive(Parser)]
#[command(
    name = "wentzell",
    version,
    about = "Size-structured population dynamics with dynamic boundary conditions"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured run and write trajectory tables.
    Simulate {
        /// Run configuration (TOML).
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compute the dominant eigenvalue and eigenprofile.
    Spectrum {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Residual tolerance for the eigenpair iteration.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Run seeded conservation, positivity, and dissipativity checks.
    Check {
        config: PathBuf,
        /// Random samples per property.
        #[arg(long, default_value_t = 25)]
        samples: usize,
        /// Resolvent shift; defaults to the model's own threshold.
        #[arg(long)]
        omega: Option<f64>,
        /// Also write summary.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate, compute the eigenpair, and write the shape-convergence
    /// distance series.
    Aeg {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Simulate { config, out } => simulate_cmd(&config, &out),
        Command::Spectrum {
            config,
            out,
            tol,
            max_iter,
        } => spectrum_cmd(&config, &out, tol, max_iter),
        Command::Check {
            config,
            samples,
            omega,
            out,
        } => check_cmd(&config, samples, omega, out.as_deref()),
        Command::Aeg {
            config,
            out,
            tol,
            max_iter,
        } => aeg_cmd(&config, &out, tol, max_iter),
    }
}

fn load(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn relative_drift(mass_start: f64, mass_end: f64) -> f64 {
    let delta = (mass_end - mass_start).abs();
    if mass_start.abs() > 0.0 {
        delta / mass_start.abs()
    } else {
        delta
    }
}

fn simulate_cmd(config: &Path, out: &Path) -> Result<i32> {
    let cfg = load(config)?;
    let model = cfg.model()?;
    let grid = cfg.grid()?;
    let g = GeneratorMatrix::assemble(&model, &grid)?;
    let scheme = cfg.scheme()?;
    for note in step_warnings(&g, scheme, cfg.dt()) {
        eprintln!("note: {note}");
    }
    let u0 = cfg.initial_state(&grid)?;
    let traj = simulate(
        &g,
        &u0,
        cfg.dt(),
        cfg.t_final(),
        scheme,
        cfg.snapshot_stride(),
    )?;
    // Mass drift only measures conservation when nothing is born or dies
    // and the boundary constants are the conservative choice.
    let conserving = model.boundary().is_conservative()
        && model.recruitment().is_zero()
        && g.mortality_nodes().iter().all(|&m| m == 0.0);
    let drift = conserving.then(|| relative_drift(traj.masses[0], *traj.masses.last().unwrap()));
    let bundle = OutputBundle {
        config: &cfg,
        grid: &grid,
        trajectory: Some(&traj),
        spectral: None,
        dissipativity: None,
        aeg: None,
        conservation_drift: drift,
        positivity_min: Some(traj.min_entry),
        seed: cfg.seed(),
    };
    write_outputs(&bundle, out)?;
    println!(
        "simulated {} steps to t = {}: mass {} -> {}, min entry {:.3e}; wrote {}",
        traj.times.len() - 1,
        traj.times.last().unwrap(),
        traj.masses[0],
        traj.masses.last().unwrap(),
        traj.min_entry,
        out.display()
    );
    Ok(0)
}

fn spectrum_cmd(config: &Path, out: &Path, tol: f64, max_iter: usize) -> Result<i32> {
    let cfg = load(config)?;
    let model = cfg.model()?;
    let grid = cfg.grid()?;
    let g = GeneratorMatrix::assemble(&model, &grid)?;
    let sp = spectral_bound(&g, tol, max_iter)?;
    let bundle = OutputBundle {
        config: &cfg,
        grid: &grid,
        trajectory: None,
        spectral: Some(&sp),
        dissipativity: None,
        aeg: None,
        conservation_drift: None,
        positivity_min: None,
        seed: cfg.seed(),
    };
    write_outputs(&bundle, out)?;
    println!(
        "malthus parameter {:.12e} (residual {:.2e}, {} iterations, irreducible: {}); wrote {}",
        sp.malthus,
        sp.residual,
        sp.iterations,
        sp.irreducible,
        out.display()
    );
    Ok(0)
}

fn check_cmd(config: &Path, samples: usize, omega: Option<f64>, out: Option<&Path>) -> Result<i32> {
    let cfg = load(config)?;
    let model = cfg.model()?;
    let grid = cfg.grid()?;
    let scheme = cfg.scheme()?;
    let mut all_pass = true;

    // Conservation: strip birth and death, run the configured horizon, and
    // demand the weighted mass moves only at roundoff level. Specific to
    // conservative boundary constants; anything else is reported as skipped.
    let mut conservation_drift = None;
    if model.boundary().is_conservative() {
        let stripped = model.without_birth_death();
        let g0 = GeneratorMatrix::assemble(&stripped, &grid)?;
        let u0 = cfg.initial_state(&grid)?;
        let traj = simulate(&g0, &u0, cfg.dt(), cfg.t_final(), scheme, 0)?;
        let drift = relative_drift(traj.masses[0], *traj.masses.last().unwrap());
        conservation_drift = Some(drift);
        let pass = drift <= 1e-10;
        all_pass &= pass;
        println!(
            "conservation:  {} (relative drift {:.3e} over {} steps, tolerance 1e-10)",
            if pass { "PASS" } else { "FAIL" },
            drift,
            traj.times.len() - 1
        );
    } else {
        println!(
            "conservation:  SKIP (boundary constants are not the conservative choice; \
             total mass is not expected to be invariant)"
        );
    }

    // Positivity: seeded nonnegative starts, implicit Euler inside the
    // step-size gate, many short runs.
    let g = GeneratorMatrix::assemble(&model, &grid)?;
    let dt = cfg.dt().min(positivity_safe_dt(&g));
    let steps = 200usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut positivity_min = f64::INFINITY;
    for _ in 0..samples.max(1) {
        let u0 = random_nonnegative_state(&mut rng, &grid);
        let traj = simulate(&g, &u0, dt, steps as f64 * dt, Scheme::ImplicitEuler, 0)?;
        positivity_min = positivity_min.min(traj.min_entry);
    }
    let pass = positivity_min >= -1e-12;
    all_pass &= pass;
    println!(
        "positivity:    {} (smallest entry {:.3e} over {} runs of {} implicit Euler steps, \
         dt = {:.3e}, tolerance -1e-12)",
        if pass { "PASS" } else { "FAIL" },
        positivity_min,
        samples.max(1),
        steps,
        dt
    );

    // Dissipativity: resolvent contraction and positivity across the
    // standard lambda sweep.
    let lambdas = [0.01, 0.1, 1.0, 10.0, 100.0];
    let report = dissipativity_check(
        &model,
        &grid,
        &lambdas,
        omega,
        samples.max(1),
        cfg.seed().wrapping_add(1),
    )?;
    let pass = report.max_ratio <= 1.0 + 1e-10 && report.positivity_violations == 0;
    all_pass &= pass;
    let caveat = if report.below_omega_min {
        format!(
            " [omega = {:.3e} is below the dissipativity threshold {:.3e}; \
             no contraction guarantee]",
            report.omega, report.omega_min
        )
    } else {
        String::new()
    };
    println!(
        "dissipativity: {} (max ratio {:.12} at lambda = {}, {} positivity violations, \
         omega = {:.3e}, tolerance 1+1e-10){}",
        if pass { "PASS" } else { "FAIL" },
        report.max_ratio,
        report.worst_lambda,
        report.positivity_violations,
        report.omega,
        caveat
    );

    if let Some(dir) = out {
        let bundle = OutputBundle {
            config: &cfg,
            grid: &grid,
            trajectory: None,
            spectral: None,
            dissipativity: Some(&report),
            aeg: None,
            conservation_drift,
            positivity_min: Some(positivity_min),
            seed: cfg.seed(),
        };
        write_outputs(&bundle, dir)?;
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn aeg_cmd(config: &Path, out: &Path, tol: f64, max_iter: usize) -> Result<i32> {
    let cfg = load(config)?;
    let model = cfg.model()?;
    let grid = cfg.grid()?;
    let g = GeneratorMatrix::assemble(&model, &grid)?;
    let scheme = cfg.scheme()?;
    for note in step_warnings(&g, scheme, cfg.dt()) {
        eprintln!("note: {note}");
    }
    let u0 = cfg.initial_state(&grid)?;
    let steps = step_count(cfg.t_final(), cfg.dt());
    let stride = if cfg.snapshot_stride() > 0 {
        cfg.snapshot_stride()
    } else {
        (steps / 64).max(1)
    };
    let traj = simulate(&g, &u0, cfg.dt(), cfg.t_final(), scheme, stride)?;
    let sp = spectral_bound(&g, tol, max_iter)?;
    let points = aeg_diagnostic(&traj, &sp, &g)?;
    let conserving = model.boundary().is_conservative()
        && model.recruitment().is_zero()
        && g.mortality_nodes().iter().all(|&m| m == 0.0);
    let drift = conserving.then(|| relative_drift(traj.masses[0], *traj.masses.last().unwrap()));
    let bundle = OutputBundle {
        config: &cfg,
        grid: &grid,
        trajectory: Some(&traj),
        spectral: Some(&sp),
        dissipativity: None,
        aeg: Some(&points),
        conservation_drift: drift,
        positivity_min: Some(traj.min_entry),
        seed: cfg.seed(),
    };
    write_outputs(&bundle, out)?;
    let (t_last, d_last) = *points.last().expect("trajectory has snapshots");
    println!(
        "malthus parameter {:.12e}; shape distance {:.6e} at t = {}; wrote {}",
        sp.malthus,
        d_last,
        t_last,
        out.display()
    );
    Ok(0)
}
