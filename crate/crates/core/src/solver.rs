//! Explicit finite-volume integrator for the radial system
//!
//! ```text
//! (r^{N-1} ρ)_t + (r^{N-1} ρ V)_r = 0
//! V_t + (V²/2 + h(ρ))_r = Φ_r
//! ```
//!
//! where `h` is the enthalpy of the γ-law gas. Mass is advanced in
//! `r^{N-1}`-weighted conservative form, velocity in primitive form. Interface
//! fluxes are local Lax-Friedrichs on minmod-reconstructed primitives, time
//! stepping is two-stage SSP Runge-Kutta. The outer `support_margin_cells`
//! cells are a solid wall: they hold `ρ = V = 0` and the face in front of them
//! carries no mass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sound_speed, FluidState, ModelConfig, RadialGrid};
use crate::poisson;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericsConfig {
    pub n_cells: usize,
    pub cfl: f64,
    pub t_end: f64,
    /// Steps shorter than this are read as a collapsing time step.
    pub dt_floor: f64,
    /// Limit on `max |∂V/∂r|`, in units of 1/time.
    pub steepening_threshold: f64,
    /// Steps between stored snapshots.
    pub output_stride: usize,
    pub support_margin_cells: usize,
    /// Vacuum floor relative to `max ρ₀`, used only inside flux evaluation.
    pub vacuum_floor: f64,
    /// Tolerated negative density relative to `max ρ₀`.
    pub positivity_tol: f64,
    /// Times at which full field snapshots are written.
    pub checkpoints: Vec<f64>,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            n_cells: 1024,
            cfl: 0.4,
            t_end: 1.0,
            dt_floor: 1e-9,
            steepening_threshold: 50.0,
            output_stride: 10,
            support_margin_cells: 2,
            vacuum_floor: 1e-12,
            positivity_tol: 1e-14,
            checkpoints: Vec::new(),
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 4 {
            return Err(Error::config("n_cells", "n_cells must be ≥ 4"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::config("cfl", "cfl must lie in (0, 1]"));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::config("t_end", "t_end must be a finite time ≥ 0"));
        }
        if !(self.dt_floor > 0.0) {
            return Err(Error::config("dt_floor", "dt_floor must be > 0"));
        }
        if !(self.steepening_threshold > 0.0) {
            return Err(Error::config(
                "steepening_threshold",
                "steepening_threshold must be > 0",
            ));
        }
        if self.output_stride == 0 {
            return Err(Error::config("output_stride", "output_stride must be ≥ 1"));
        }
        if self.support_margin_cells >= self.n_cells {
            return Err(Error::config(
                "support_margin_cells",
                "support_margin_cells must be smaller than n_cells",
            ));
        }
        if !(self.vacuum_floor >= 0.0) {
            return Err(Error::config("vacuum_floor", "vacuum_floor must be ≥ 0"));
        }
        if !(self.positivity_tol >= 0.0) {
            return Err(Error::config("positivity_tol", "positivity_tol must be ≥ 0"));
        }
        if self.checkpoints.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::config("checkpoints", "checkpoints must be times ≥ 0"));
        }
        Ok(())
    }
}

/// Time derivatives of the stored fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub drho: Vec<f64>,
    pub dvel: Vec<f64>,
}

impl Tendency {
    /// Tendency of the momentum density `ρV` in cell `i`.
    pub fn momentum(&self, state: &FluidState, i: usize) -> f64 {
        state.rho[i] * self.dvel[i] + state.vel[i] * self.drho[i]
    }
}

/// Outcome of the CFL step-size computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Advance(f64),
    /// The wave-speed limited step fell below `dt_floor`.
    Collapsed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Steepening {
    pub cell: usize,
    pub radius: f64,
    pub gradient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedTEnd,
    SteepeningDetected,
    DtCollapsed,
    PositivityViolated,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ReachedTEnd => "reached_t_end",
            Termination::SteepeningDetected => "steepening_detected",
            Termination::DtCollapsed => "dt_collapsed",
            Termination::PositivityViolated => "positivity_violated",
        }
    }

    pub fn is_singular(self) -> bool {
        matches!(self, Termination::SteepeningDetected | Termination::DtCollapsed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<FluidState>,
    pub termination: Termination,
    pub t_detect: Option<f64>,
    pub steps: usize,
}

/// Cell fields extended by two mirror ghosts at each end of the active region.
/// Index `k` holds cell `k - 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extended {
    pub rho: Vec<f64>,
    pub vel: Vec<f64>,
}

impl Extended {
    pub const GHOSTS: usize = 2;

    pub fn rho_at(&self, cell: isize) -> f64 {
        self.rho[(cell + Self::GHOSTS as isize) as usize]
    }

    pub fn vel_at(&self, cell: isize) -> f64 {
        self.vel[(cell + Self::GHOSTS as isize) as usize]
    }
}

/// Discretisation context for one model / grid / numerics combination.
#[derive(Debug, Clone)]
pub struct Solver {
    cfg: ModelConfig,
    num: NumericsConfig,
    grid: RadialGrid,
    rho_floor: f64,
    rho_scale: f64,
    face_area: Vec<f64>,
    weight: Vec<f64>,
}

impl Solver {
    /// `rho_scale` is the reference density (normally `max ρ₀`) for the vacuum
    /// floor and the positivity tolerance.
    pub fn new(cfg: ModelConfig, num: NumericsConfig, rho_scale: f64) -> Result<Self> {
        cfg.validate()?;
        num.validate()?;
        let grid = RadialGrid::new(cfg.support_radius, num.n_cells)?;
        let p = cfg.dim as i32 - 1;
        let face_area = (0..=grid.n_cells()).map(|j| grid.face(j).powi(p)).collect();
        let weight = (0..grid.n_cells()).map(|i| grid.weight(i, cfg.dim)).collect();
        Ok(Self {
            rho_floor: num.vacuum_floor * rho_scale,
            rho_scale,
            cfg,
            num,
            grid,
            face_area,
            weight,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn model(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn numerics(&self) -> &NumericsConfig {
        &self.num
    }

    pub fn rho_floor(&self) -> f64 {
        self.rho_floor
    }

    fn active(&self) -> usize {
        self.grid.n_cells() - self.num.support_margin_cells
    }

    fn enthalpy(&self, rho: f64) -> f64 {
        let k = self.cfg.pressure_const;
        let g = self.cfg.gamma;
        if k == 0.0 {
            0.0
        } else if g == 1.0 {
            k * rho.max(self.rho_floor).max(f64::MIN_POSITIVE).ln()
        } else {
            k * g / (g - 1.0) * rho.max(0.0).powf(g - 1.0)
        }
    }

    /// Mirror-extends the active region: even density and odd velocity about
    /// `r = 0`, and the same reflection about the wall face.
    pub fn extend(&self, state: &FluidState) -> Extended {
        let a = self.active() as isize;
        let g = Extended::GHOSTS as isize;
        let mut rho = Vec::with_capacity(a as usize + 4);
        let mut vel = Vec::with_capacity(a as usize + 4);
        for k in -g..a + g {
            let (mut i, mut sign) = (k, 1.0);
            while i < 0 || i >= a {
                if i < 0 {
                    i = -1 - i;
                } else {
                    i = 2 * a - 1 - i;
                }
                sign = -sign;
            }
            rho.push(state.rho[i as usize]);
            vel.push(sign * state.vel[i as usize]);
        }
        Extended { rho, vel }
    }

    pub fn rhs_eval(&self, state: &FluidState) -> Result<Tendency> {
        self.grid.check_len(state.len())?;
        let n = self.grid.n_cells();
        let a = self.active();
        let dr = self.grid.dr();
        let ext = self.extend(state);

        let slopes = |u: &[f64]| -> Vec<f64> {
            let mut s = vec![0.0; u.len()];
            for k in 1..u.len() - 1 {
                s[k] = minmod(u[k] - u[k - 1], u[k + 1] - u[k]);
            }
            s
        };
        let srho = slopes(&ext.rho);
        let svel = slopes(&ext.vel);

        let mut mass_flux = vec![0.0; a + 1];
        let mut vel_flux = vec![0.0; a + 1];
        for j in 0..=a {
            // face j: left cell j - 1 (ext j + 1), right cell j (ext j + 2)
            let (kl, kr) = (j + 1, j + 2);
            let rl = (ext.rho[kl] + 0.5 * srho[kl]).max(0.0);
            let rr = (ext.rho[kr] - 0.5 * srho[kr]).max(0.0);
            let vl = ext.vel[kl] + 0.5 * svel[kl];
            let vr = ext.vel[kr] - 0.5 * svel[kr];
            let speed = (vl.abs() + sound_speed(rl, &self.cfg)).max(vr.abs() + sound_speed(rr, &self.cfg));

            if j != 0 && j != a {
                mass_flux[j] = 0.5 * (rl * vl + rr * vr) - 0.5 * speed * (rr - rl);
            }
            let gl = 0.5 * vl * vl + self.enthalpy(rl);
            let gr = 0.5 * vr * vr + self.enthalpy(rr);
            vel_flux[j] = 0.5 * (gl + gr) - 0.5 * speed * (vr - vl);
        }

        let mut field = vec![0.0; n];
        poisson::field_values(&state.rho, &self.grid, &self.cfg, &mut field);

        let mut drho = vec![0.0; n];
        let mut dvel = vec![0.0; n];
        for i in 0..a {
            drho[i] = -(self.face_area[i + 1] * mass_flux[i + 1] - self.face_area[i] * mass_flux[i]) / self.weight[i];
            if state.rho[i] > self.rho_floor {
                dvel[i] = -(vel_flux[i + 1] - vel_flux[i]) / dr + field[i];
            }
            if !drho[i].is_finite() || !dvel[i].is_finite() {
                return Err(Error::NumericalBreakdown {
                    cell: i,
                    what: format!("non-finite tendency (drho = {}, dvel = {})", drho[i], dvel[i]),
                });
            }
        }
        Ok(Tendency { drho, dvel })
    }

    /// `dt = cfl Δr / max(|V| + c)`, capped by the remaining time to `t_end`.
    pub fn cfl_dt(&self, state: &FluidState) -> TimeStep {
        let cap = (self.num.t_end - state.time).max(0.0);
        let speed = state
            .rho
            .iter()
            .zip(&state.vel)
            .map(|(&r, &v)| v.abs() + sound_speed(r.max(0.0), &self.cfg))
            .fold(0.0, f64::max);
        if speed == 0.0 {
            return TimeStep::Advance(cap);
        }
        let dt = self.num.cfl * self.grid.dr() / speed;
        if dt < self.num.dt_floor {
            TimeStep::Collapsed(dt)
        } else {
            TimeStep::Advance(dt.min(cap))
        }
    }

    /// Zeroes the wall margin in place.
    pub fn apply_boundary(&self, state: &mut FluidState) {
        let a = self.active();
        state.rho[a..].fill(0.0);
        state.vel[a..].fill(0.0);
    }

    fn hold_vacuum(&self, state: &mut FluidState) {
        for (r, v) in state.rho.iter().zip(state.vel.iter_mut()) {
            if *r <= self.rho_floor {
                *v = 0.0;
            }
        }
    }

    /// One SSP-RK2 step of length `dt`.
    pub fn step(&self, state: &FluidState, dt: f64) -> Result<FluidState> {
        let k0 = self.rhs_eval(state)?;
        let mut stage = state.clone();
        for i in 0..state.len() {
            stage.rho[i] += dt * k0.drho[i];
            stage.vel[i] += dt * k0.dvel[i];
        }
        self.apply_boundary(&mut stage);
        self.hold_vacuum(&mut stage);

        let k1 = self.rhs_eval(&stage)?;
        let mut next = state.clone();
        for i in 0..state.len() {
            next.rho[i] = 0.5 * state.rho[i] + 0.5 * (stage.rho[i] + dt * k1.drho[i]);
            next.vel[i] = 0.5 * state.vel[i] + 0.5 * (stage.vel[i] + dt * k1.dvel[i]);
        }
        self.apply_boundary(&mut next);
        self.hold_vacuum(&mut next);
        next.time = state.time + dt;

        let tol = self.num.positivity_tol * self.rho_scale;
        if let Some((cell, &value)) = next.rho.iter().enumerate().find(|(_, &r)| r < -tol) {
            return Err(Error::PositivityViolated {
                cell,
                value,
                time: next.time,
            });
        }
        Ok(next)
    }

    pub fn detect_steepening(&self, state: &FluidState) -> Option<Steepening> {
        let s = max_gradient(state, &self.grid)?;
        (s.gradient > self.num.steepening_threshold).then_some(s)
    }
}

/// Largest centred difference `|V_{i+1} - V_{i-1}| / (2Δr)` over interior cells.
pub fn max_gradient(state: &FluidState, grid: &RadialGrid) -> Option<Steepening> {
    let v = &state.vel;
    let dr = grid.dr();
    (1..v.len().saturating_sub(1))
        .map(|i| Steepening {
            cell: i,
            radius: grid.centers()[i],
            gradient: (v[i + 1] - v[i - 1]).abs() / (2.0 * dr),
        })
        .fold(None, |best: Option<Steepening>, s| match best {
            Some(b) if b.gradient >= s.gradient => Some(b),
            _ => Some(s),
        })
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}
