use crate::diagnostics::{DiagnosticsSeries, RunReport};
use crate::error::{Error, Result};
use crate::model::{validate_initial_data, FluidState, ModelConfig};
use crate::solver::{NumericsConfig, Solver, Termination, TimeStep, Trajectory};

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub series: DiagnosticsSeries,
    pub report: RunReport,
}

/// Integrates from `(rho0, vel0)` until `t_end` or the first singularity
/// symptom: `max |∂V/∂r|` above the steepening threshold, or a CFL step
/// below `dt_floor`. Steps are shortened to land exactly on each checkpoint
/// time, and a snapshot is kept there.
pub fn run(rho0: &[f64], vel0: &[f64], cfg: &ModelConfig, num: &NumericsConfig) -> Result<RunOutput> {
    let rho_scale = rho0.iter().copied().fold(0.0, f64::max);
    let solver = Solver::new(*cfg, num.clone(), rho_scale)?;
    let grid = solver.grid();

    let check = validate_initial_data(rho0, vel0, grid, cfg, num.support_margin_cells)?;
    if !check.nonnegative {
        return Err(Error::Validation("initial density has negative values".into()));
    }
    if !check.compact_support {
        return Err(Error::Validation(format!(
            "initial data does not vanish on the outer {} cells",
            num.support_margin_cells
        )));
    }

    let mut state = FluidState::new(0.0, rho0.to_vec(), vel0.to_vec())?;
    solver.apply_boundary(&mut state);
    let mut snapshots = vec![state.clone()];
    let mut steps = 0usize;
    let mut t_detect = None;
    let mut checkpoints: Vec<f64> = num
        .checkpoints
        .iter()
        .copied()
        .filter(|&t| t > 0.0 && t <= num.t_end)
        .collect();
    checkpoints.sort_by(f64::total_cmp);
    checkpoints.dedup();
    let mut pending = checkpoints.into_iter().peekable();

    let termination = loop {
        if solver.detect_steepening(&state).is_some() {
            t_detect = Some(state.time);
            break Termination::SteepeningDetected;
        }
        if state.time >= num.t_end {
            break Termination::ReachedTEnd;
        }
        let dt = match solver.cfl_dt(&state) {
            TimeStep::Advance(dt) => pending.peek().map_or(dt, |&tc| dt.min(tc - state.time)),
            TimeStep::Collapsed(_) => {
                t_detect = Some(state.time);
                break Termination::DtCollapsed;
            }
        };
        match solver.step(&state, dt) {
            Ok(next) => state = next,
            Err(Error::PositivityViolated { .. }) => break Termination::PositivityViolated,
            Err(e) => return Err(e),
        }
        steps += 1;
        let mut at_checkpoint = false;
        if let Some(&tc) = pending.peek() {
            if state.time >= tc - 1e-12 * tc.max(1.0) {
                state.time = tc;
                at_checkpoint = true;
                pending.next();
            }
        }
        let at_end = state.time >= num.t_end;
        if steps.is_multiple_of(num.output_stride)
            || at_end
            || at_checkpoint
            || solver.detect_steepening(&state).is_some()
        {
            snapshots.push(state.clone());
        }
    };

    if snapshots.last().map(|s| s.time) != Some(state.time) && termination != Termination::PositivityViolated {
        snapshots.push(state.clone());
    }

    let series = DiagnosticsSeries::from_snapshots(&snapshots, grid, cfg)?;
    let report = RunReport::assess(&series, cfg, termination, t_detect);
    Ok(RunOutput {
        trajectory: Trajectory {
            snapshots,
            termination,
            t_detect,
            steps,
        },
        series,
        report,
    })
}
