//! Physical model: the γ-law equation of state, the radial grid, the fluid
//! state and admissibility checks for initial data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the radial Euler / Euler-Poisson system.
///
/// `delta` selects the force: `0` pure Euler, `+1` repulsive Poisson field,
/// `-1` attractive (accepted for contrast runs only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub dim: usize,
    pub delta: i32,
    pub pressure_const: f64,
    pub gamma: f64,
    pub support_radius: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            delta: 0,
            pressure_const: 0.0,
            gamma: 1.4,
            support_radius: 1.0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if !matches!(self.delta, -1..=1) {
            return Err(Error::config("delta", "delta must be -1, 0 or 1"));
        }
        if !(self.pressure_const >= 0.0) || !self.pressure_const.is_finite() {
            return Err(Error::config("pressure_const", "pressure_const must be ≥ 0"));
        }
        if !(self.gamma >= 1.0) || !self.gamma.is_finite() {
            return Err(Error::config("gamma", "gamma must be ≥ 1"));
        }
        if !(self.support_radius > 0.0) || !self.support_radius.is_finite() {
            return Err(Error::config("support_radius", "support_radius must be > 0"));
        }
        Ok(())
    }

    pub fn is_pressureless(&self) -> bool {
        self.pressure_const == 0.0
    }

    /// Equation of state covered by the blowup bound: pressureless or γ > 1.
    pub fn eos_in_theorem_scope(&self) -> bool {
        self.is_pressureless() || self.gamma > 1.0
    }

    /// Human-readable reasons this configuration falls outside the blowup bound.
    pub fn scope_notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if !self.eos_in_theorem_scope() {
            notes.push("isothermal gamma = 1 with pressure is outside the blowup bound hypotheses".to_string());
        }
        if self.delta < 0 {
            notes.push("attractive force delta = -1 is outside the blowup bound hypotheses".to_string());
        }
        notes
    }
}

/// Uniform cell-centred grid on `[0, R]`. No cell centre sits on `r = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    radius: f64,
    dr: f64,
    centers: Vec<f64>,
}

impl RadialGrid {
    pub fn new(radius: f64, n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::config("n_cells", "n_cells must be ≥ 1"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::config("support_radius", "support_radius must be > 0"));
        }
        let dr = radius / n_cells as f64;
        let centers = (0..n_cells).map(|i| (i as f64 + 0.5) * dr).collect();
        Ok(Self { radius, dr, centers })
    }

    pub fn n_cells(&self) -> usize {
        self.centers.len()
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Radius of face `j`, the left face of cell `j`.
    pub fn face(&self, j: usize) -> f64 {
        j as f64 * self.dr
    }

    /// Midpoint-rule weight `r_i^{N-1} Δr` of cell `i`.
    pub fn weight(&self, i: usize, dim: usize) -> f64 {
        self.centers[i].powi(dim as i32 - 1) * self.dr
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.centers.iter().map(|&r| f(r)).collect()
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_cells() {
            return Err(Error::Shape {
                expected: self.n_cells(),
                got: len,
            });
        }
        Ok(())
    }
}

/// Density and radial velocity per cell at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub time: f64,
    pub rho: Vec<f64>,
    pub vel: Vec<f64>,
}

impl FluidState {
    pub fn new(time: f64, rho: Vec<f64>, vel: Vec<f64>) -> Result<Self> {
        if rho.len() != vel.len() {
            return Err(Error::Shape {
                expected: rho.len(),
                got: vel.len(),
            });
        }
        Ok(Self { time, rho, vel })
    }

    pub fn vacuum(n_cells: usize) -> Self {
        Self {
            time: 0.0,
            rho: vec![0.0; n_cells],
            vel: vec![0.0; n_cells],
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn max_density(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::max)
    }
}

/// `P(ρ) = K ρ^γ`.
pub fn pressure(rho: f64, cfg: &ModelConfig) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::Domain(format!("negative density {rho}")));
    }
    Ok(pressure_unchecked(rho, cfg))
}

pub(crate) fn pressure_unchecked(rho: f64, cfg: &ModelConfig) -> f64 {
    if cfg.pressure_const == 0.0 || rho == 0.0 {
        0.0
    } else {
        cfg.pressure_const * rho.powf(cfg.gamma)
    }
}

/// `c = sqrt(dP/dρ) = sqrt(K γ ρ^{γ-1})`.
pub fn sound_speed(rho: f64, cfg: &ModelConfig) -> f64 {
    if cfg.pressure_const == 0.0 || rho <= 0.0 {
        return 0.0;
    }
    (cfg.pressure_const * cfg.gamma * rho.powf(cfg.gamma - 1.0)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub nonnegative: bool,
    pub compact_support: bool,
    pub h0: f64,
    pub h0_positive: bool,
    pub eos_in_scope: bool,
    /// H₀ > 0, δ ≥ 0 and (K = 0 or γ > 1).
    pub theorem_applicable: bool,
}

impl ValidationReport {
    pub fn admissible(&self) -> bool {
        self.nonnegative && self.compact_support
    }
}

/// Checks initial data against the blowup bound hypotheses. `margin_cells` is the
/// number of outermost cells in which both fields must vanish.
pub fn validate_initial_data(
    rho0: &[f64],
    vel0: &[f64],
    grid: &RadialGrid,
    cfg: &ModelConfig,
    margin_cells: usize,
) -> Result<ValidationReport> {
    grid.check_len(rho0.len())?;
    grid.check_len(vel0.len())?;

    let nonnegative = rho0.iter().all(|&r| r >= 0.0);
    let start = grid.n_cells().saturating_sub(margin_cells);
    let compact_support = rho0[start..].iter().all(|&r| r == 0.0) && vel0[start..].iter().all(|&v| v == 0.0);

    let h0 = crate::diagnostics::h_of_velocity(vel0, grid);
    let h0_positive = h0 > 0.0;
    let eos_in_scope = cfg.eos_in_theorem_scope();
    Ok(ValidationReport {
        nonnegative,
        compact_support,
        h0,
        h0_positive,
        eos_in_scope,
        theorem_applicable: h0_positive && eos_in_scope && cfg.delta >= 0,
    })
}
