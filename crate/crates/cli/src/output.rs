use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use radial_euler_core::diagnostics::{CAUCHY_REL_TOL, ENVELOPE_REL_TOL, RICCATI_COEFFICIENT};
use radial_euler_core::{DiagnosticsSeries, FluidState, RadialGrid, RunOutput};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), num)
}

/// Hex SHA-256 of the resolved configuration document.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let digest = Sha256::digest(config.to_document().as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn series_table(series: &DiagnosticsSeries) -> String {
    let mut out = String::from("t\tH\tmass\tenergy_lhs\triccati_residual\tenvelope\tcauchy_gap\tmax_abs_dVdr\n");
    for i in 0..series.len() {
        let row = [
            series.times[i],
            series.h_values[i],
            series.mass_values[i],
            series.energy_values[i],
            series.riccati_residuals[i],
            series.envelope_values[i],
            series.cauchy_gaps[i],
            series.max_gradients[i],
        ];
        let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

pub fn snapshot_table(state: &FluidState, grid: &RadialGrid) -> String {
    let mut out = String::from("r\trho\tV\n");
    for ((r, rho), v) in grid.centers().iter().zip(&state.rho).zip(&state.vel) {
        let _ = writeln!(out, "{}\t{}\t{}", num(*r), num(*rho), num(*v));
    }
    out
}

pub fn summary_text(run_id: &str, config: &ExperimentConfig, output: &RunOutput, warnings: &[String]) -> String {
    let r = &output.report;
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    line("run_id", run_id.to_string());
    line("config_hash", config_hash(config));
    line("initial_family", config.initial.family().to_string());
    line("H0", num(r.h0));
    line("T_bound", opt(r.t_bound));
    line("t_detect", opt(r.t_detect));
    line("t_reached", num(r.t_reached));
    line("termination", r.termination.as_str().to_string());
    line("verdict", r.verdict.as_str().to_string());
    line("theorem_applicable", r.theorem_applicable.to_string());
    line("steps", output.trajectory.steps.to_string());
    line("max_mass_drift", num(r.max_mass_drift));
    line("envelope_violations", r.envelope_violations.to_string());
    line("min_relative_cauchy_gap", num(r.min_relative_cauchy_gap));
    line("min_riccati_residual", num(r.min_riccati_residual));
    line("steepening_threshold", num(config.numerics.steepening_threshold));
    line("envelope_rel_tol", num(ENVELOPE_REL_TOL));
    line("cauchy_rel_tol", num(CAUCHY_REL_TOL));
    line("riccati_coefficient", num(RICCATI_COEFFICIENT));
    for note in &r.scope_notes {
        line("scope_note", note.clone());
    }
    for w in warnings {
        line("warning", w.clone());
    }
    out
}

/// Writes every deterministic artefact of one run into `dir`.
pub fn write_run(
    dir: &Path,
    run_id: &str,
    config: &ExperimentConfig,
    output: &RunOutput,
    warnings: &[String],
) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("resolved-config.txt"), config.to_document())?;
    fs::write(dir.join("series.tsv"), series_table(&output.series))?;
    fs::write(dir.join("summary.txt"), summary_text(run_id, config, output, warnings))?;

    let grid = RadialGrid::new(config.model.support_radius, config.numerics.n_cells)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    for &tc in &config.numerics.checkpoints {
        if let Some(state) = output.trajectory.snapshots.iter().find(|s| s.time == tc) {
            fs::write(dir.join(format!("snapshot-{tc}.tsv")), snapshot_table(state, &grid))?;
        }
    }
    Ok(())
}

/// Non-deterministic run information, kept apart from the other artefacts.
pub fn write_metadata(dir: &Path, started_unix: u64, elapsed_ms: u128) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("metadata.txt"),
        format!(
            "started_unix = {started_unix}\nelapsed_ms = {elapsed_ms}\nversion = {}\n",
            env!("CARGO_PKG_VERSION")
        ),
    )
}
