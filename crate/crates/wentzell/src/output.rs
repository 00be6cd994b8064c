//! Result files: plot-ready CSV tables and a machine-readable summary.
//!
//! Every command writes into one directory. `timeseries.csv` tracks mass and
//! boundary values per step, `profile.csv` holds the final profile and/or
//! the dominant eigenprofile over the size axis, `aeg.csv` the
//! shape-convergence distances, and `summary.json` the scalar results plus
//! an echo of the configuration. Floats are written with 17 significant
//! digits so files round-trip through binary exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::grid::Grid;
use crate::resolvent::DissipativityReport;
use crate::spectral::SpectralResult;

/// Everything a command wants persisted; absent parts are simply skipped
/// (and appear as `null` in the summary).
pub struct OutputBundle<'a> {
    pub config: &'a RunConfig,
    pub grid: &'a Grid,
    pub trajectory: Option<&'a Trajectory>,
    pub spectral: Option<&'a SpectralResult>,
    pub dissipativity: Option<&'a DissipativityReport>,
    pub aeg: Option<&'a [(f64, f64)]>,
    pub conservation_drift: Option<f64>,
    pub positivity_min: Option<f64>,
    pub seed: u64,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn json_opt(v: Option<f64>) -> serde_json::Value {
    match v {
        Some(x) if x.is_finite() => json!(x),
        Some(_) => json!(null),
        None => json!(null),
    }
}

/// Writes the bundle into `out_dir` (created if needed) and returns the
/// paths produced.
pub fn write_outputs(bundle: &OutputBundle, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();

    if let Some(traj) = bundle.trajectory {
        let mut csv = String::from("t,total_mass,u_boundary_0,u_boundary_m\n");
        for k in 0..traj.times.len() {
            let (lo, hi) = traj.boundary_series[k];
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                fmt(traj.times[k]),
                fmt(traj.masses[k]),
                fmt(lo),
                fmt(hi)
            );
        }
        let path = out_dir.join("timeseries.csv");
        write_file(&path, &csv)?;
        written.push(path);
    }

    if bundle.trajectory.is_some() || bundle.spectral.is_some() {
        let mut header = vec!["s"];
        if bundle.trajectory.is_some() {
            header.push("u");
        }
        if bundle.spectral.is_some() {
            header.push("eigenprofile");
        }
        let mut csv = header.join(",");
        csv.push('\n');
        for i in 0..bundle.grid.len() {
            let mut row = vec![fmt(bundle.grid.node(i))];
            if let Some(traj) = bundle.trajectory {
                row.push(fmt(traj.final_state()[i]));
            }
            if let Some(sp) = bundle.spectral {
                row.push(fmt(sp.right_vector[i]));
            }
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        let path = out_dir.join("profile.csv");
        write_file(&path, &csv)?;
        written.push(path);
    }

    if let Some(points) = bundle.aeg {
        let mut csv = String::from("t,distance\n");
        for (t, dist) in points {
            let _ = writeln!(csv, "{},{}", fmt(*t), fmt(*dist));
        }
        let path = out_dir.join("aeg.csv");
        write_file(&path, &csv)?;
        written.push(path);
    }

    let summary = json!({
        "malthus": json_opt(bundle.spectral.map(|s| s.malthus)),
        "residual": json_opt(bundle.spectral.map(|s| s.residual)),
        "irreducible": bundle
            .spectral
            .map(|s| json!(s.irreducible))
            .unwrap_or(json!(null)),
        "conservation_drift": json_opt(bundle.conservation_drift),
        "positivity_min": json_opt(bundle.positivity_min),
        "dissipativity_max_ratio": json_opt(bundle.dissipativity.map(|d| d.max_ratio)),
        "config": serde_json::to_value(bundle.config)
            .map_err(|e| Error::Config(format!("cannot echo configuration: {e}")))?,
        "seed": bundle.seed,
    });
    let path = out_dir.join("summary.json");
    write_file(&path, &format!("{:#}\n", summary))?;
    written.push(path);

    Ok(written)
}
