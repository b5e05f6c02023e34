use proptest::prelude::*;
use radial_euler_core::characteristics::{emden_boundary_ode, first_crossing_time, velocity_at, Profile};
use radial_euler_core::{run, ModelConfig, NumericsConfig, RadialGrid, Termination, Verdict};

fn bump(n: usize, margin: usize, amp: f64) -> (RadialGrid, Vec<f64>, Vec<f64>) {
    let grid = RadialGrid::new(1.0, n).unwrap();
    let mut rho = grid.sample(|r| (1.0 - r * r).powi(2));
    let mut vel = grid.sample(|r| amp * r * (1.0 - r));
    rho[n - margin..].fill(0.0);
    vel[n - margin..].fill(0.0);
    (grid, rho, vel)
}

fn pressureless() -> ModelConfig {
    ModelConfig {
        pressure_const: 0.0,
        ..ModelConfig::default()
    }
}

#[test]
fn burgers_profile_detected_near_crossing_time() {
    let profile = Profile::analytic(1.0, |r| r * (1.0 - r), |r| 1.0 - 2.0 * r);
    let t_star = first_crossing_time(&profile).unwrap().unwrap();
    assert!((t_star - 1.0).abs() < 1e-12);

    let num = NumericsConfig {
        n_cells: 1024,
        t_end: 6.0,
        steepening_threshold: 50.0,
        ..NumericsConfig::default()
    };
    let (_, rho, vel) = bump(1024, num.support_margin_cells, 1.0);
    let out = run(&rho, &vel, &pressureless(), &num).unwrap();
    let t_detect = out.trajectory.t_detect.unwrap();
    assert_eq!(out.trajectory.termination, Termination::SteepeningDetected);
    assert!((0.9..=1.1).contains(&t_detect), "{t_detect}");
    assert_eq!(out.report.verdict, Verdict::Confirmed);
}

#[test]
fn smooth_phase_matches_characteristics() {
    let profile = Profile::analytic(1.0, |r| r * (1.0 - r), |r| 1.0 - 2.0 * r);
    let num = NumericsConfig {
        n_cells: 512,
        t_end: 0.5,
        ..NumericsConfig::default()
    };
    let (grid, rho, vel) = bump(512, num.support_margin_cells, 1.0);
    let out = run(&rho, &vel, &pressureless(), &num).unwrap();
    let last = out.trajectory.snapshots.last().unwrap();
    assert_eq!(last.time, 0.5);
    let max_err = grid
        .centers()
        .iter()
        .zip(&last.vel)
        .filter(|(&r, _)| r < 0.9)
        .map(|(&r, &v)| (v - velocity_at(&profile, 0.5, r)).abs())
        .fold(0.0, f64::max);
    assert!(max_err < 1e-3, "{max_err}");
}

#[test]
fn slab_boundary_moves_with_constant_acceleration() {
    let cfg = ModelConfig {
        dim: 1,
        delta: 1,
        ..ModelConfig::default()
    };
    let traj = emden_boundary_ode(1.0, 0.5, &cfg, 1.0, 1e-3).unwrap();
    for (t, r) in traj.times.iter().zip(&traj.radius) {
        assert!((r - (1.0 + 0.25 * t * t)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mass_conserved_for_all_models(
        delta in 0i32..=1,
        k in 0.0f64..0.5,
        gamma in 1.0f64..2.5,
        dim in 1usize..=3,
        amp in -1.0f64..1.5,
    ) {
        let cfg = ModelConfig { dim, delta, pressure_const: k, gamma, support_radius: 1.0 };
        let num = NumericsConfig { n_cells: 96, t_end: 0.05, ..NumericsConfig::default() };
        let (_, rho, vel) = bump(96, num.support_margin_cells, amp);
        let out = run(&rho, &vel, &cfg, &num).unwrap();
        prop_assert!(out.report.max_mass_drift <= 1e-12, "{}", out.report.max_mass_drift);
        prop_assert!(out.series.cauchy_gaps.iter().all(|&g| g >= -1e-12));
    }
}
