use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Context;
use radial_euler_core::{RadialGrid, RunOutput, Termination, Verdict};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, RunSpec};
use crate::output;
use crate::profile::{build_initial_profile, InitialData};

/// Outcome of one run as seen by the orchestrator.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub id: String,
    pub verdict: Option<Verdict>,
    pub termination: Option<Termination>,
    pub t_bound: Option<f64>,
    pub t_detect: Option<f64>,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some() || self.termination == Some(Termination::PositivityViolated)
    }
}

/// `2` if any run violated the bound, else `1` if any run failed, else `0`.
pub fn exit_code(records: &[RunRecord]) -> i32 {
    if records.iter().any(|r| r.verdict == Some(Verdict::Violated)) {
        2
    } else if records.iter().any(RunRecord::failed) {
        1
    } else {
        0
    }
}

pub fn default_runner(spec: &RunSpec, data: &InitialData) -> radial_euler_core::Result<RunOutput> {
    radial_euler_core::run(&data.rho, &data.vel, &spec.config.model, &spec.config.numerics)
}

/// Runs every expanded run of `config` with the standard solver.
pub fn execute(config: &ExperimentConfig, output_dir: &Path, jobs: usize) -> anyhow::Result<Vec<RunRecord>> {
    execute_with(config, output_dir, jobs, default_runner)
}

/// Like [`execute`] with the integration replaced by `runner`.
pub fn execute_with<F>(
    config: &ExperimentConfig,
    output_dir: &Path,
    jobs: usize,
    runner: F,
) -> anyhow::Result<Vec<RunRecord>>
where
    F: Fn(&RunSpec, &InitialData) -> radial_euler_core::Result<RunOutput> + Sync,
{
    execute_runs(&config.expand(), output_dir, jobs, runner)
}

pub fn execute_runs<F>(runs: &[RunSpec], output_dir: &Path, jobs: usize, runner: F) -> anyhow::Result<Vec<RunRecord>>
where
    F: Fn(&RunSpec, &InitialData) -> radial_euler_core::Result<RunOutput> + Sync,
{
    fs::create_dir_all(output_dir).with_context(|| format!("creating {}", output_dir.display()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("building thread pool")?;
    let records: Vec<RunRecord> = pool.install(|| {
        runs.par_iter()
            .map(|spec| one_run(spec, &output_dir.join(&spec.id), &runner))
            .collect()
    });
    fs::write(output_dir.join("index.tsv"), index_table(runs, &records))
        .with_context(|| format!("writing index in {}", output_dir.display()))?;
    Ok(records)
}

fn one_run<F>(spec: &RunSpec, dir: &Path, runner: &F) -> RunRecord
where
    F: Fn(&RunSpec, &InitialData) -> radial_euler_core::Result<RunOutput>,
{
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let mut record = RunRecord {
        id: spec.id.clone(),
        verdict: None,
        termination: None,
        t_bound: None,
        t_detect: None,
        error: None,
    };
    let result = (|| -> anyhow::Result<()> {
        let cfg = &spec.config;
        let grid = RadialGrid::new(cfg.model.support_radius, cfg.numerics.n_cells)?;
        let data = build_initial_profile(
            &cfg.initial,
            &grid,
            &cfg.model,
            cfg.numerics.support_margin_cells,
            cfg.seed,
        )?;
        let out = runner(spec, &data)?;
        record.verdict = Some(out.report.verdict);
        record.termination = Some(out.report.termination);
        record.t_bound = out.report.t_bound;
        record.t_detect = out.report.t_detect;
        output::write_run(dir, &spec.id, cfg, &out, &data.warnings)?;
        Ok(())
    })();
    if let Err(e) = result {
        record.error = Some(format!("{e:#}"));
        let _ = fs::create_dir_all(dir).and_then(|_| fs::write(dir.join("error.txt"), format!("{e:#}\n")));
    }
    let _ = output::write_metadata(dir, started, clock.elapsed().as_millis());
    record
}

fn index_table(runs: &[RunSpec], records: &[RunRecord]) -> String {
    let mut out =
        String::from("run_id\tdelta\tpressure_const\tgamma\tn_cells\ttermination\tverdict\tT_bound\tt_detect\n");
    let show = |x: Option<f64>| x.map_or_else(|| "none".to_string(), |v| format!("{v:.16e}"));
    for (spec, rec) in runs.iter().zip(records) {
        let m = &spec.config.model;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            spec.id,
            m.delta,
            m.pressure_const,
            m.gamma,
            spec.config.numerics.n_cells,
            rec.termination
                .map_or(if rec.error.is_some() { "error" } else { "none" }, Termination::as_str),
            rec.verdict.map_or("none", Verdict::as_str),
            show(rec.t_bound),
            show(rec.t_detect),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(verdict: Option<Verdict>, termination: Option<Termination>, error: bool) -> RunRecord {
        RunRecord {
            id: "run-000".into(),
            verdict,
            termination,
            t_bound: None,
            t_detect: None,
            error: error.then(|| "boom".to_string()),
        }
    }

    #[test]
    fn exit_code_contract() {
        let ok = record(Some(Verdict::Confirmed), Some(Termination::SteepeningDetected), false);
        let pending = record(Some(Verdict::Pending), Some(Termination::ReachedTEnd), false);
        let broken = record(None, None, true);
        let negative = record(Some(Verdict::Pending), Some(Termination::PositivityViolated), false);
        let violated = record(Some(Verdict::Violated), Some(Termination::ReachedTEnd), false);
        assert_eq!(exit_code(&[]), 0);
        assert_eq!(exit_code(&[ok.clone(), pending.clone()]), 0);
        assert_eq!(exit_code(&[ok.clone(), broken.clone()]), 1);
        assert_eq!(exit_code(&[negative]), 1);
        assert_eq!(exit_code(&[broken, violated, ok]), 2);
    }
}
