//! Discrete evaluation of the blowup argument: the functional
//! `H(t) = ∫_0^R r V dr`, the Cauchy-Schwarz step, the Riccati inequality
//! `dH/dt ≥ 2H²/R³`, its explicit envelope and the bound `T = R³/(2H₀)`.
//!
//! All radial integrals use the midpoint rule on cell centres, the same
//! weights the solver conserves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{pressure_unchecked, FluidState, ModelConfig, RadialGrid};
use crate::poisson::alpha;
use crate::solver::{max_gradient, Termination};

/// Coefficient `c` of the Riccati inequality `dH/dt ≥ c H² / R³` as stated
/// with the blowup bound `T = R³/(2H₀)`.
pub const RICCATI_COEFFICIENT: f64 = 2.0;

/// Relative tolerance of the envelope check `H ≥ (1 - tol) · envelope`.
pub const ENVELOPE_REL_TOL: f64 = 1e-3;

/// Tolerance of the Cauchy-Schwarz gap relative to `1 + ∫V² 2r dr`.
pub const CAUCHY_REL_TOL: f64 = 1e-8;

pub(crate) fn h_of_velocity(vel: &[f64], grid: &RadialGrid) -> f64 {
    vel.iter().zip(grid.centers()).map(|(&v, &r)| r * v).sum::<f64>() * grid.dr()
}

/// `H = Σ r_i V_i Δr`.
pub fn functional_h(state: &FluidState, grid: &RadialGrid) -> f64 {
    h_of_velocity(&state.vel, grid)
}

/// `T = R³ / (2 H₀)`.
pub fn blowup_bound(h0: f64, radius: f64) -> Result<f64> {
    if !(h0 > 0.0) {
        return Err(Error::Inapplicable(format!("H0 = {h0} is not positive")));
    }
    Ok(radius.powi(3) / (2.0 * h0))
}

/// Lower barrier `H(t) ≥ -R³H₀ / (2H₀t - R³)`, defined for `0 ≤ t < T`.
pub fn envelope(t: f64, h0: f64, radius: f64) -> Result<f64> {
    let bound = blowup_bound(h0, radius)?;
    if !(t >= 0.0) || t >= bound {
        return Err(Error::Domain(format!(
            "envelope diverges at T = {bound}, requested t = {t}"
        )));
    }
    let r3 = radius.powi(3);
    Ok(-r3 * h0 / (2.0 * h0 * t - r3))
}

/// Forward-difference residuals `ΔH/Δt - 2 H_mid² / R³` over consecutive
/// samples.
pub fn riccati_residual(h: &[f64], times: &[f64], radius: f64) -> Result<Vec<f64>> {
    riccati_residual_with(h, times, radius, RICCATI_COEFFICIENT)
}

/// Same as [`riccati_residual`] with an explicit coefficient `c` in
/// `dH/dt ≥ c H² / R³`.
pub fn riccati_residual_with(h: &[f64], times: &[f64], radius: f64, coefficient: f64) -> Result<Vec<f64>> {
    if h.len() != times.len() {
        return Err(Error::Shape {
            expected: times.len(),
            got: h.len(),
        });
    }
    if h.len() < 2 {
        return Err(Error::Domain("riccati residual needs at least two samples".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("sample times must be strictly increasing".into()));
    }
    let r3 = radius.powi(3);
    Ok(h.windows(2)
        .zip(times.windows(2))
        .map(|(hw, tw)| {
            let mid = 0.5 * (hw[0] + hw[1]);
            (hw[1] - hw[0]) / (tw[1] - tw[0]) - coefficient * mid * mid / r3
        })
        .collect())
}

/// `∫_0^R V² d(r²) - 4H²/R²`, nonnegative by Cauchy-Schwarz.
pub fn cauchy_schwarz_gap(state: &FluidState, grid: &RadialGrid, radius: f64) -> f64 {
    let h = functional_h(state, grid);
    second_moment(state, grid) - 4.0 * h * h / (radius * radius)
}

/// `∫_0^R V² 2r dr`.
pub fn second_moment(state: &FluidState, grid: &RadialGrid) -> f64 {
    state
        .vel
        .iter()
        .zip(grid.centers())
        .map(|(&v, &r)| 2.0 * r * v * v)
        .sum::<f64>()
        * grid.dr()
}

/// `M = α(N) Σ ρ_i r_i^{N-1} Δr`.
pub fn mass(state: &FluidState, grid: &RadialGrid, cfg: &ModelConfig) -> Result<f64> {
    let a = alpha(cfg.dim)?;
    Ok(a * (0..grid.n_cells())
        .map(|i| state.rho[i] * grid.weight(i, cfg.dim))
        .sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCondition {
    /// `2 ∫ (ρ V² + 2P) dx`.
    pub lhs: f64,
    pub mass_squared: f64,
    /// `lhs < M²`.
    pub holds: bool,
}

impl EnergyCondition {
    pub fn margin(&self) -> f64 {
        self.mass_squared - self.lhs
    }
}

/// Informational monitor of the energy condition `2∫(ρ|u|² + 2P)dx < M²`.
pub fn energy_condition(state: &FluidState, grid: &RadialGrid, cfg: &ModelConfig) -> Result<EnergyCondition> {
    let a = alpha(cfg.dim)?;
    let integral: f64 = (0..grid.n_cells())
        .map(|i| {
            let rho = state.rho[i].max(0.0);
            (rho * state.vel[i] * state.vel[i] + 2.0 * pressure_unchecked(rho, cfg)) * grid.weight(i, cfg.dim)
        })
        .sum();
    let lhs = 2.0 * a * integral;
    let m = mass(state, grid, cfg)?;
    Ok(EnergyCondition {
        lhs,
        mass_squared: m * m,
        holds: lhs < m * m,
    })
}

/// Per-snapshot diagnostics. Values that are undefined at a sample are NaN:
/// the last Riccati residual (no forward difference) and the envelope at or
/// past `T` or when `H₀ ≤ 0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsSeries {
    pub times: Vec<f64>,
    pub h_values: Vec<f64>,
    pub mass_values: Vec<f64>,
    pub energy_values: Vec<f64>,
    pub riccati_residuals: Vec<f64>,
    pub envelope_values: Vec<f64>,
    pub cauchy_gaps: Vec<f64>,
    pub second_moments: Vec<f64>,
    pub max_gradients: Vec<f64>,
}

impl DiagnosticsSeries {
    pub fn from_snapshots(snapshots: &[FluidState], grid: &RadialGrid, cfg: &ModelConfig) -> Result<Self> {
        let mut s = DiagnosticsSeries::default();
        for st in snapshots {
            s.times.push(st.time);
            s.h_values.push(functional_h(st, grid));
            s.mass_values.push(mass(st, grid, cfg)?);
            s.energy_values.push(energy_condition(st, grid, cfg)?.lhs);
            s.cauchy_gaps.push(cauchy_schwarz_gap(st, grid, cfg.support_radius));
            s.second_moments.push(second_moment(st, grid));
            s.max_gradients.push(max_gradient(st, grid).map_or(0.0, |g| g.gradient));
        }
        let h0 = s.h_values.first().copied().unwrap_or(0.0);
        s.envelope_values = s
            .times
            .iter()
            .map(|&t| envelope(t, h0, cfg.support_radius).unwrap_or(f64::NAN))
            .collect();
        s.riccati_residuals = if s.times.len() >= 2 {
            let mut r = riccati_residual(&s.h_values, &s.times, cfg.support_radius)?;
            r.push(f64::NAN);
            r
        } else {
            vec![f64::NAN; s.times.len()]
        };
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|M_k - M_0| / M_0`; zero for vacuum.
    pub fn max_mass_drift(&self) -> f64 {
        let Some(&m0) = self.mass_values.first() else {
            return 0.0;
        };
        if m0 == 0.0 {
            return 0.0;
        }
        self.mass_values.iter().map(|m| (m - m0).abs() / m0).fold(0.0, f64::max)
    }

    /// Number of samples strictly before `t_stop` with
    /// `H < (1 - ENVELOPE_REL_TOL) · envelope`.
    pub fn envelope_violations(&self, t_stop: Option<f64>) -> usize {
        self.times
            .iter()
            .zip(&self.h_values)
            .zip(&self.envelope_values)
            .filter(|((&t, _), e)| e.is_finite() && t_stop.is_none_or(|ts| t < ts))
            .filter(|((_, &h), &e)| h < (1.0 - ENVELOPE_REL_TOL) * e)
            .count()
    }

    /// Smallest `gap / (1 + ∫V² 2r dr)` over all samples.
    pub fn min_relative_cauchy_gap(&self) -> f64 {
        self.cauchy_gaps
            .iter()
            .zip(&self.second_moments)
            .map(|(g, m)| g / (1.0 + m))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Singularity detected no later than the bound.
    Confirmed,
    /// No detection yet, but the run ended before the bound.
    Pending,
    /// The run got past the bound without a singularity.
    Violated,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Pending => "pending",
            Verdict::Violated => "violated",
            Verdict::NotApplicable => "not_applicable",
        }
    }

    /// `t_reached` is the last simulated time.
    pub fn assess(applicable: bool, t_bound: Option<f64>, t_detect: Option<f64>, t_reached: f64) -> Self {
        let (true, Some(bound)) = (applicable, t_bound) else {
            return Verdict::NotApplicable;
        };
        match t_detect {
            Some(t) if t <= bound => Verdict::Confirmed,
            Some(_) => Verdict::Violated,
            None if t_reached >= bound => Verdict::Violated,
            None => Verdict::Pending,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub h0: f64,
    pub t_bound: Option<f64>,
    pub t_detect: Option<f64>,
    pub t_reached: f64,
    pub termination: Termination,
    pub theorem_applicable: bool,
    pub verdict: Verdict,
    pub scope_notes: Vec<String>,
    pub max_mass_drift: f64,
    pub envelope_violations: usize,
    pub min_relative_cauchy_gap: f64,
    pub min_riccati_residual: f64,
}

impl RunReport {
    /// Builds a report from a diagnostics series. Also the entry point for
    /// externally supplied series.
    pub fn assess(
        series: &DiagnosticsSeries,
        cfg: &ModelConfig,
        termination: Termination,
        t_detect: Option<f64>,
    ) -> Self {
        let h0 = series.h_values.first().copied().unwrap_or(0.0);
        let t_bound = blowup_bound(h0, cfg.support_radius).ok();
        let theorem_applicable = h0 > 0.0 && cfg.eos_in_theorem_scope() && cfg.delta >= 0;
        let t_reached = series.times.last().copied().unwrap_or(0.0);
        let mut scope_notes = cfg.scope_notes();
        if h0 <= 0.0 {
            scope_notes.push(format!("H0 = {h0:e} is not positive"));
        }
        let min_riccati_residual = series
            .riccati_residuals
            .iter()
            .zip(&series.times)
            .filter(|(r, &t)| r.is_finite() && t_detect.is_none_or(|td| t < td))
            .map(|(r, _)| *r)
            .fold(f64::INFINITY, f64::min);
        Self {
            h0,
            t_bound,
            t_detect,
            t_reached,
            termination,
            theorem_applicable,
            verdict: Verdict::assess(theorem_applicable, t_bound, t_detect, t_reached),
            scope_notes,
            max_mass_drift: series.max_mass_drift(),
            envelope_violations: series.envelope_violations(t_detect),
            min_relative_cauchy_gap: series.min_relative_cauchy_gap(),
            min_riccati_residual,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state(grid: &RadialGrid, v: impl Fn(f64) -> f64) -> FluidState {
        FluidState::new(0.0, vec![0.0; grid.n_cells()], grid.sample(v)).unwrap()
    }

    #[test]
    fn functional_h_examples() {
        let g = RadialGrid::new(1.0, 400).unwrap();
        assert_eq!(functional_h(&state(&g, |_| 0.0), &g), 0.0);
        assert!((functional_h(&state(&g, |r| r * (1.0 - r)), &g) - 1.0 / 12.0).abs() < 1e-6);
        let g2 = RadialGrid::new(2.0, 400).unwrap();
        assert_relative_eq!(functional_h(&state(&g2, |_| 1.0), &g2), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bound_examples() {
        assert_relative_eq!(blowup_bound(1.0 / 12.0, 1.0).unwrap(), 6.0, epsilon = 1e-14);
        assert_relative_eq!(blowup_bound(1.0, 2.0).unwrap(), 4.0);
        assert!(matches!(blowup_bound(0.0, 1.0), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn envelope_examples() {
        let h0 = 1.0 / 12.0;
        assert_relative_eq!(envelope(0.0, h0, 1.0).unwrap(), h0, epsilon = 1e-16);
        assert_relative_eq!(envelope(3.0, h0, 1.0).unwrap(), 1.0 / 6.0, epsilon = 1e-14);
        assert!(envelope(6.0, h0, 1.0).is_err());
        let seq: Vec<f64> = (1..=6)
            .map(|k| envelope(6.0 - 10f64.powi(-k), h0, 1.0).unwrap())
            .collect();
        assert!(seq.windows(2).all(|w| w[1] > 10.0 * w[0] * 0.9));
        assert!(*seq.last().unwrap() > 1e4);
    }

    #[test]
    fn riccati_examples() {
        let t: Vec<f64> = (0..10).map(|k| k as f64 * 0.1).collect();
        let r = riccati_residual(&[0.0; 10], &t, 1.0).unwrap();
        assert!(r.iter().all(|&x| x == 0.0));

        let dec: Vec<f64> = (0..10).map(|k| 1.0 - 0.05 * k as f64).collect();
        assert!(riccati_residual(&dec, &t, 1.0).unwrap().iter().all(|&x| x < 0.0));

        let mut bad = t.clone();
        bad.swap(2, 3);
        assert!(riccati_residual(&dec, &bad, 1.0).is_err());
        assert!(riccati_residual(&[1.0], &[0.0], 1.0).is_err());
    }

    #[test]
    fn riccati_residual_vanishes_on_the_envelope_at_second_order() {
        // the envelope solves dH/dt = 2H²/R³ exactly
        let (h0, r) = (0.1, 1.3);
        let worst = |m: usize| {
            let t: Vec<f64> = (0..=m).map(|k| 2.0 * k as f64 / m as f64).collect();
            let h: Vec<f64> = t.iter().map(|&t| envelope(t, h0, r).unwrap()).collect();
            riccati_residual(&h, &t, r)
                .unwrap()
                .iter()
                .fold(0.0f64, |a, x| a.max(x.abs()))
        };
        let (e1, e2) = (worst(100), worst(200));
        assert!(e2 < e1);
        assert!((e1 / e2).log2() > 1.9, "{}", (e1 / e2).log2());
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let g = RadialGrid::new(1.5, 300).unwrap();
        assert_eq!(cauchy_schwarz_gap(&state(&g, |_| 0.0), &g, 1.5), 0.0);
        let c = 0.7;
        let gap = cauchy_schwarz_gap(&state(&g, |_| c), &g, 1.5);
        assert!(gap.abs() <= 1e-10 * c * c * 1.5 * 1.5, "{gap}");

        // V = r(1 - r) on [0, 1]: ∫V² 2r dr = 1/30, 4H²/R² = 1/36
        let g = RadialGrid::new(1.0, 300).unwrap();
        let gap = cauchy_schwarz_gap(&state(&g, |r| r * (1.0 - r)), &g, 1.0);
        assert!((gap - (1.0 / 30.0 - 1.0 / 36.0)).abs() < 1e-5, "{gap}");
    }

    #[test]
    fn mass_examples() {
        let g = RadialGrid::new(1.0, 1000).unwrap();
        let c3 = ModelConfig::default();
        assert_eq!(mass(&FluidState::vacuum(1000), &g, &c3).unwrap(), 0.0);
        let uni = FluidState::new(0.0, vec![2.0; 1000], vec![0.0; 1000]).unwrap();
        let exact = 4.0 * std::f64::consts::PI * 2.0 / 3.0;
        assert!((mass(&uni, &g, &c3).unwrap() - exact).abs() < 1e-5 * exact);
        let c1 = ModelConfig { dim: 1, ..c3 };
        let one = FluidState::new(0.0, vec![1.0; 1000], vec![0.0; 1000]).unwrap();
        assert!((mass(&one, &g, &c1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn energy_condition_examples() {
        let g = RadialGrid::new(1.0, 100).unwrap();
        let c = ModelConfig::default();
        let e = energy_condition(&FluidState::vacuum(100), &g, &c).unwrap();
        assert_eq!((e.lhs, e.mass_squared, e.holds), (0.0, 0.0, false));
        let dust = FluidState::new(0.0, g.sample(|r| 1.0 - r), vec![0.0; 100]).unwrap();
        let e = energy_condition(&dust, &g, &c).unwrap();
        assert_eq!(e.lhs, 0.0);
        assert!(e.holds && e.margin() > 0.0);
    }

    #[test]
    fn verdict_table() {
        use Verdict::*;
        assert_eq!(Verdict::assess(false, Some(6.0), Some(1.0), 1.0), NotApplicable);
        assert_eq!(Verdict::assess(true, None, None, 1.0), NotApplicable);
        assert_eq!(Verdict::assess(true, Some(6.0), Some(1.0), 1.0), Confirmed);
        assert_eq!(Verdict::assess(true, Some(6.0), Some(6.0), 6.0), Confirmed);
        assert_eq!(Verdict::assess(true, Some(6.0), None, 5.0), Pending);
        assert_eq!(Verdict::assess(true, Some(6.0), None, 6.0), Violated);
        assert_eq!(Verdict::assess(true, Some(6.0), Some(7.0), 7.0), Violated);
    }

    #[test]
    fn decreasing_series_past_the_bound_is_violated() {
        let cfg = ModelConfig::default();
        let times: Vec<f64> = (0..=70).map(|k| k as f64 * 0.1).collect();
        let h: Vec<f64> = times.iter().map(|t| (1.0 / 12.0) * (-t / 10.0f64).exp()).collect();
        let n = times.len();
        let series = DiagnosticsSeries {
            riccati_residuals: {
                let mut r = riccati_residual(&h, &times, 1.0).unwrap();
                r.push(f64::NAN);
                r
            },
            envelope_values: times
                .iter()
                .map(|&t| envelope(t, h[0], 1.0).unwrap_or(f64::NAN))
                .collect(),
            times,
            h_values: h,
            mass_values: vec![1.0; n],
            energy_values: vec![0.0; n],
            cauchy_gaps: vec![0.0; n],
            second_moments: vec![0.0; n],
            max_gradients: vec![0.0; n],
        };
        let rep = RunReport::assess(&series, &cfg, Termination::ReachedTEnd, None);
        assert!(rep.theorem_applicable);
        assert_eq!(rep.verdict, Verdict::Violated);
        assert!(rep.envelope_violations > 0);
        assert!(rep.min_riccati_residual < 0.0);
    }
}
