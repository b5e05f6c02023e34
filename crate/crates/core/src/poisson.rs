//! Radial force field of the Poisson equation,
//! `Φ_r(r) = α(N) δ r^{1-N} ∫_0^r ρ(s) s^{N-1} ds`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{ModelConfig, RadialGrid};

/// Unit-ball constant α(N) for N = 1, 2, 3.
pub fn alpha(dim: usize) -> Result<f64> {
    match dim {
        1 => Ok(1.0),
        2 => Ok(2.0 * PI),
        3 => Ok(4.0 * PI),
        n => Err(Error::UnsupportedDimension(n)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    /// Force per unit mass at each cell centre.
    pub phi_r: Vec<f64>,
    /// Running values of `∫_0^{r_i} ρ s^{N-1} ds`.
    pub cumulative: Vec<f64>,
}

pub fn radial_field(rho: &[f64], grid: &RadialGrid, cfg: &ModelConfig) -> Result<FieldProfile> {
    grid.check_len(rho.len())?;
    if let Some(i) = rho.iter().position(|&r| !(r >= 0.0)) {
        return Err(Error::Domain(format!("negative density {} in cell {i}", rho[i])));
    }
    let a = alpha(cfg.dim)?;
    let cumulative = cumulative_integral(rho, grid, cfg.dim);
    let phi_r = if cfg.delta == 0 {
        vec![0.0; rho.len()]
    } else {
        field_from_cumulative(&cumulative, grid, cfg.dim, a * cfg.delta as f64)
    };
    Ok(FieldProfile { phi_r, cumulative })
}

/// Field values only; negative round-off densities are clamped to zero.
pub(crate) fn field_values(rho: &[f64], grid: &RadialGrid, cfg: &ModelConfig, out: &mut [f64]) {
    if cfg.delta == 0 {
        out.fill(0.0);
        return;
    }
    let scale = alpha(cfg.dim).expect("validated dimension") * cfg.delta as f64;
    let dim = cfg.dim;
    let dr = grid.dr();
    let r = grid.centers();
    let clamp = |x: f64| x.max(0.0);

    let mut acc = clamp(rho[0]) * r[0].powi(dim as i32) / dim as f64;
    out[0] = scale * acc / r[0].powi(dim as i32 - 1);
    for i in 1..rho.len() {
        let face = grid.face(i);
        acc += dr * 0.5 * (clamp(rho[i - 1]) + clamp(rho[i])) * face.powi(dim as i32 - 1);
        out[i] = scale * acc / r[i].powi(dim as i32 - 1);
    }
}

fn cumulative_integral(rho: &[f64], grid: &RadialGrid, dim: usize) -> Vec<f64> {
    let r = grid.centers();
    let dr = grid.dr();
    let mut out = Vec::with_capacity(rho.len());
    // [0, r_0] with ρ held at ρ(r_0)
    let mut acc = rho[0] * r[0].powi(dim as i32) / dim as f64;
    out.push(acc);
    for i in 1..rho.len() {
        // midpoint rule on [r_{i-1}, r_i]; the midpoint is face i
        acc += dr * 0.5 * (rho[i - 1] + rho[i]) * grid.face(i).powi(dim as i32 - 1);
        out.push(acc);
    }
    out
}

fn field_from_cumulative(cumulative: &[f64], grid: &RadialGrid, dim: usize, scale: f64) -> Vec<f64> {
    cumulative
        .iter()
        .zip(grid.centers())
        .map(|(&c, &r)| scale * c / r.powi(dim as i32 - 1))
        .collect()
}
