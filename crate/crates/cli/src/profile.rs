use radial_euler_core::{validate_initial_data, ModelConfig, RadialGrid, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::InitialProfile;

/// Sampled initial data on the cell centres.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub rho: Vec<f64>,
    pub vel: Vec<f64>,
    pub h0: f64,
    pub warnings: Vec<String>,
}

fn cutoff(r: f64, support: f64) -> f64 {
    if r < support {
        let s = r / support;
        (1.0 - s * s).powi(2)
    } else {
        0.0
    }
}

/// Samples `profile` on `grid`. The outer `margin` cells are set to exactly
/// zero so the data has compact support inside the domain.
pub fn build_initial_profile(
    profile: &InitialProfile,
    grid: &RadialGrid,
    model: &ModelConfig,
    margin: usize,
    seed: u64,
) -> Result<InitialData> {
    let radius = grid.radius();
    let (mut rho, mut vel) = match profile {
        InitialProfile::PolynomialBump(p) => {
            let rho = grid.sample(|r| {
                let s = r / radius;
                p.rho_amplitude * (1.0 - s * s).max(0.0).powi(p.rho_power)
            });
            let vel = grid.sample(|r| p.vel_amplitude * r * (1.0 - r / radius));
            (rho, vel)
        }
        InitialProfile::GaussianTruncated(p) => {
            let support = p.support_fraction * radius;
            let width = p.width * radius;
            let rho = grid.sample(|r| p.rho_amplitude * (-(r / width).powi(2)).exp() * cutoff(r, support));
            let vel = grid.sample(|r| {
                if r < support {
                    p.vel_amplitude * r * (1.0 - r / support)
                } else {
                    0.0
                }
            });
            (rho, vel)
        }
        InitialProfile::RandomSmooth(p) => {
            let support = p.support_fraction * radius;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<f64> = (1..=p.modes).map(|k| rng.gen_range(-1.0..1.0) / k as f64).collect();
            let b: Vec<f64> = (1..=p.modes).map(|k| rng.gen_range(-1.0..1.0) / k as f64).collect();
            let wave = |r: f64, k: usize| k as f64 * std::f64::consts::PI * r / support;
            let vel = grid.sample(|r| {
                if r >= support {
                    return 0.0;
                }
                p.vel_amplitude
                    * a.iter()
                        .enumerate()
                        .map(|(j, ak)| ak * wave(r, j + 1).sin())
                        .sum::<f64>()
            });
            let rho = grid.sample(|r| {
                let c = cutoff(r, support);
                if c == 0.0 {
                    return 0.0;
                }
                let s: f64 = b.iter().enumerate().map(|(j, bk)| bk * wave(r, j + 1).cos()).sum();
                p.rho_amplitude * c * (0.5 * s).exp()
            });
            (rho, vel)
        }
    };

    let start = grid.n_cells().saturating_sub(margin);
    rho[start..].fill(0.0);
    vel[start..].fill(0.0);

    let report = validate_initial_data(&rho, &vel, grid, model, margin)?;
    let mut warnings = Vec::new();
    if !report.h0_positive {
        warnings.push(format!(
            "H0 = {:e} is not positive; the blowup bound does not apply",
            report.h0
        ));
    }
    if !report.eos_in_scope {
        warnings.push("equation of state outside the blowup bound's hypotheses".to_string());
    }
    Ok(InitialData {
        rho,
        vel,
        h0: report.h0,
        warnings,
    })
}
