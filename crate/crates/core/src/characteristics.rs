//! Semi-analytic reference solutions.
//!
//! For pressureless Euler (`K = 0`, `δ = 0`) the radial velocity obeys
//! `V_t + V V_r = 0`: it is carried unchanged along straight lines
//! `r(t; r₀) = r₀ + t V₀(r₀)` until neighbouring lines first meet at
//! `t* = -1 / min V₀'`. Also here: density transport along a characteristic
//! and the boundary ODE `R'' = δ M / R^{N-1}`.

use crate::error::{Error, Result};
use crate::model::ModelConfig;

/// Sample count used to minimise `V₀'` on `[0, R]`; ten times the default
/// solver resolution.
pub const DERIVATIVE_SAMPLES: usize = 10_240;

type RealFn<'a> = Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>;

/// Initial velocity on `[0, R]`, optionally with its closed-form derivative.
pub struct Profile<'a> {
    radius: f64,
    value: RealFn<'a>,
    derivative: Option<RealFn<'a>>,
}

impl<'a> Profile<'a> {
    pub fn analytic(
        radius: f64,
        value: impl Fn(f64) -> f64 + Send + Sync + 'a,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'a,
    ) -> Self {
        Self {
            radius,
            value: Box::new(value),
            derivative: Some(Box::new(derivative)),
        }
    }

    /// Profile known only pointwise; derivatives come from finite differences.
    pub fn sampled(radius: f64, value: impl Fn(f64) -> f64 + Send + Sync + 'a) -> Self {
        Self {
            radius,
            value: Box::new(value),
            derivative: None,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn value(&self, r: f64) -> f64 {
        (self.value)(r)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(r),
            None => {
                let h = self.radius / DERIVATIVE_SAMPLES as f64;
                let v = |x: f64| (self.value)(x);
                if r - h < 0.0 {
                    (-3.0 * v(r) + 4.0 * v(r + h) - v(r + 2.0 * h)) / (2.0 * h)
                } else if r + h > self.radius {
                    (3.0 * v(r) - 4.0 * v(r - h) + v(r - 2.0 * h)) / (2.0 * h)
                } else {
                    (v(r + h) - v(r - h)) / (2.0 * h)
                }
            }
        }
    }

    /// `r ↦ r + t V₀(r)`.
    pub fn map(&self, r0: f64, t: f64) -> f64 {
        r0 + t * self.value(r0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharField {
    pub r0: Vec<f64>,
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
}

/// Minimum of `V₀'` over `[0, R]` and where it is attained.
pub fn min_derivative(profile: &Profile) -> Result<(f64, f64)> {
    let n = DERIVATIVE_SAMPLES;
    let h = profile.radius / n as f64;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=n {
        let r = k as f64 * h;
        let d = profile.derivative(r);
        if !d.is_finite() {
            return Err(Error::Domain(format!("non-finite derivative {d} at r = {r}")));
        }
        if d < best.0 {
            best = (d, r);
        }
    }
    if profile.derivative.is_some() {
        // golden-section polish inside the bracketing samples
        let (mut a, mut b) = ((best.1 - h).max(0.0), (best.1 + h).min(profile.radius));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if profile.derivative(c) < profile.derivative(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let r = 0.5 * (a + b);
        let d = profile.derivative(r);
        if d < best.0 {
            best = (d, r);
        }
    }
    Ok(best)
}

/// `t* = -1 / min V₀'`, or `None` when `V₀` is nondecreasing.
pub fn first_crossing_time(profile: &Profile) -> Result<Option<f64>> {
    let (m, _) = min_derivative(profile)?;
    Ok((m < 0.0).then(|| -1.0 / m))
}

pub fn characteristic_solution(profile: &Profile, t: f64, r0_samples: &[f64]) -> Result<CharField> {
    if let Some(t_star) = first_crossing_time(profile)? {
        if t >= t_star {
            return Err(Error::Crossing { t, t_star });
        }
    }
    let values: Vec<f64> = r0_samples.iter().map(|&r| profile.value(r)).collect();
    let positions = r0_samples.iter().zip(&values).map(|(&r, &v)| r + t * v).collect();
    Ok(CharField {
        r0: r0_samples.to_vec(),
        positions,
        values,
    })
}

/// Velocity at `(t, r)` by inverting the characteristic map on `[0, R]`.
/// Points not reached by any characteristic get zero.
pub fn velocity_at(profile: &Profile, t: f64, r: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, profile.radius);
    let (m_lo, m_hi) = (profile.map(lo, t), profile.map(hi, t));
    if r < m_lo || r > m_hi {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if profile.map(mid, t) < r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * profile.radius {
            break;
        }
    }
    profile.value(0.5 * (lo + hi))
}

/// `ρ₀ exp(-∫_0^t div u dτ)`, trapezoid rule over the samples.
pub fn density_along_characteristic(rho0: f64, div_u: &[f64], times: &[f64]) -> Result<f64> {
    if !(rho0 >= 0.0) {
        return Err(Error::Domain(format!("negative initial density {rho0}")));
    }
    if div_u.len() != times.len() {
        return Err(Error::Shape {
            expected: times.len(),
            got: div_u.len(),
        });
    }
    if div_u.iter().any(|d| !d.is_finite()) {
        return Err(Error::Domain("non-finite divergence sample".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("times must be strictly increasing".into()));
    }
    let integral: f64 = div_u
        .windows(2)
        .zip(times.windows(2))
        .map(|(d, t)| 0.5 * (d[0] + d[1]) * (t[1] - t[0]))
        .sum();
    Ok(rho0 * (-integral).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmdenTrajectory {
    pub times: Vec<f64>,
    pub radius: Vec<f64>,
    pub speed: Vec<f64>,
    /// The radius reached zero (attractive case).
    pub collapsed: bool,
}

/// Conserved energy `Ṙ²/2 + U(R)` with `U' = -δM/R^{N-1}`.
pub fn emden_energy(radius: f64, speed: f64, mass: f64, cfg: &ModelConfig) -> f64 {
    let dm = cfg.delta as f64 * mass;
    let potential = match cfg.dim {
        1 => -dm * radius,
        2 => -dm * radius.ln(),
        n => dm / ((n as f64 - 2.0) * radius.powi(n as i32 - 2)),
    };
    0.5 * speed * speed + potential
}

/// Integrates `R'' = δM / R^{N-1}`, `R(0) = R₀`, `R'(0) = 0` with classical
/// fourth-order Runge-Kutta.
pub fn emden_boundary_ode(r0: f64, mass: f64, cfg: &ModelConfig, t_end: f64, dt: f64) -> Result<EmdenTrajectory> {
    if !(r0 > 0.0) {
        return Err(Error::Domain(format!("initial radius {r0} must be positive")));
    }
    if !(mass >= 0.0) {
        return Err(Error::Domain(format!("mass {mass} must be nonnegative")));
    }
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Domain("need dt > 0 and t_end ≥ 0".into()));
    }
    let dm = cfg.delta as f64 * mass;
    let p = cfg.dim as i32 - 1;
    let accel = |r: f64| dm / r.powi(p);

    let steps = (t_end / dt).round() as usize;
    let mut out = EmdenTrajectory {
        times: vec![0.0],
        radius: vec![r0],
        speed: vec![0.0],
        collapsed: false,
    };
    let (mut r, mut v) = (r0, 0.0);
    for k in 1..=steps {
        let k1 = (v, accel(r));
        let k2 = (v + 0.5 * dt * k1.1, accel(r + 0.5 * dt * k1.0));
        let k3 = (v + 0.5 * dt * k2.1, accel(r + 0.5 * dt * k2.0));
        let k4 = (v + dt * k3.1, accel(r + dt * k3.0));
        r += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if !(r > 1e-12 * r0) || !r.is_finite() || !v.is_finite() {
            out.collapsed = true;
            break;
        }
        out.times.push(k as f64 * dt);
        out.radius.push(r);
        out.speed.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic() -> Profile<'static> {
        Profile::analytic(1.0, |r| r * (1.0 - r), |r| 1.0 - 2.0 * r)
    }

    #[test]
    fn identity_at_time_zero() {
        let r0: Vec<f64> = (0..11).map(|k| k as f64 / 10.0).collect();
        let f = characteristic_solution(&quadratic(), 0.0, &r0).unwrap();
        assert_eq!(f.positions, r0);
    }

    #[test]
    fn uniform_velocity_translates() {
        let p = Profile::analytic(1.0, |_| 0.3, |_| 0.0);
        let r0 = [0.1, 0.5, 0.9];
        let f = characteristic_solution(&p, 2.0, &r0).unwrap();
        for (x, y) in f.positions.iter().zip(r0) {
            assert!((x - (y + 0.6)).abs() < 1e-15);
        }
        assert_eq!(first_crossing_time(&p).unwrap(), None);
    }

    #[test]
    fn quadratic_profile_at_half_time() {
        let r0: Vec<f64> = (0..=1000).map(|k| k as f64 / 1000.0).collect();
        let f = characteristic_solution(&quadratic(), 0.5, &r0).unwrap();
        for (i, &x) in r0.iter().enumerate() {
            assert_eq!(f.positions[i], x + 0.5 * x * (1.0 - x));
            assert_eq!(f.values[i], x * (1.0 - x));
        }
        assert!(f.positions.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn crossing_times() {
        let t = first_crossing_time(&quadratic()).unwrap().unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        let comp = Profile::analytic(1.0, |r| -r, |_| -1.0);
        assert!((first_crossing_time(&comp).unwrap().unwrap() - 1.0).abs() < 1e-15);
        let rare = Profile::analytic(1.0, |r| r * r, |r| 2.0 * r);
        assert_eq!(first_crossing_time(&rare).unwrap(), None);
        assert!(matches!(
            characteristic_solution(&quadratic(), 1.0, &[0.5]),
            Err(Error::Crossing { .. })
        ));
        let bad = Profile::sampled(1.0, |r| if r > 0.5 { f64::NAN } else { r });
        assert!(matches!(first_crossing_time(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn sampled_profile_agrees_with_analytic() {
        let p = Profile::sampled(1.0, |r| r * (1.0 - r));
        let t = first_crossing_time(&p).unwrap().unwrap();
        assert!((t - 1.0).abs() < 1e-9, "{t}");
        let s = Profile::sampled(2.0, |r: f64| (3.0 * r).sin() * r);
        let a = Profile::analytic(
            2.0,
            |r: f64| (3.0 * r).sin() * r,
            |r: f64| 3.0 * r * (3.0 * r).cos() + (3.0 * r).sin(),
        );
        let (ts, ta) = (
            first_crossing_time(&s).unwrap().unwrap(),
            first_crossing_time(&a).unwrap().unwrap(),
        );
        assert!((ts - ta).abs() < 1e-6 * ta, "{ts} {ta}");
    }

    #[test]
    fn inversion_recovers_transported_velocity() {
        let p = quadratic();
        for &r0 in &[0.05, 0.3, 0.77, 0.99] {
            let r = p.map(r0, 0.6);
            assert!((velocity_at(&p, 0.6, r) - p.value(r0)).abs() < 1e-12);
        }
    }

    #[test]
    fn density_transport() {
        let t: Vec<f64> = (0..=100).map(|k| k as f64 * 0.02).collect();
        assert_eq!(density_along_characteristic(0.0, &vec![3.0; 101], &t).unwrap(), 0.0);
        assert_eq!(density_along_characteristic(1.7, &vec![0.0; 101], &t).unwrap(), 1.7);
        let rho = density_along_characteristic(1.7, &vec![0.8; 101], &t).unwrap();
        assert!((rho - 1.7 * (-1.6f64).exp()).abs() < 1e-14);
        assert!(density_along_characteristic(-1.0, &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn emden_closed_forms() {
        let euler = ModelConfig {
            delta: 0,
            ..ModelConfig::default()
        };
        let tr = emden_boundary_ode(0.7, 2.0, &euler, 1.0, 1e-3).unwrap();
        assert!(tr.radius.iter().all(|&r| r == 0.7));

        let line = ModelConfig {
            dim: 1,
            delta: 1,
            ..ModelConfig::default()
        };
        let tr = emden_boundary_ode(0.5, 2.0, &line, 1.0, 1e-3).unwrap();
        for (t, r) in tr.times.iter().zip(&tr.radius) {
            assert!((r - (0.5 + t * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn attractive_collapse_is_flagged() {
        let grav = ModelConfig {
            delta: -1,
            ..ModelConfig::default()
        };
        let tr = emden_boundary_ode(1.0, 1.0, &grav, 5.0, 1e-3).unwrap();
        assert!(tr.collapsed);
        assert!(*tr.times.last().unwrap() < 5.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn crossing_time_scales_inversely(c in 0.1f64..10.0, a in 0.2f64..3.0) {
                let p = Profile::analytic(1.0, move |r| a * r * (1.0 - r), move |r| a * (1.0 - 2.0 * r));
                let q = Profile::analytic(1.0, move |r| c * a * r * (1.0 - r), move |r| c * a * (1.0 - 2.0 * r));
                let (tp, tq) = (first_crossing_time(&p).unwrap().unwrap(), first_crossing_time(&q).unwrap().unwrap());
                prop_assert!((tq - tp / c).abs() <= 1e-12 * tp / c);
            }

            #[test]
            fn map_is_monotone_before_crossing(frac in 0.0f64..0.999) {
                let p = quadratic();
                let t = frac * first_crossing_time(&p).unwrap().unwrap();
                let r0: Vec<f64> = (0..=2000).map(|k| k as f64 / 2000.0).collect();
                let f = characteristic_solution(&p, t, &r0).unwrap();
                prop_assert!(f.positions.windows(2).all(|w| w[1] > w[0]));
                for (v, &x) in f.values.iter().zip(&r0) {
                    prop_assert_eq!(*v, p.value(x));
                }
            }

            #[test]
            fn transported_density_stays_positive(rho0 in 1e-6f64..10.0, d in -5.0f64..5.0) {
                let t: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
                let div: Vec<f64> = t.iter().map(|&s| d * (1.0 + s)).collect();
                prop_assert!(density_along_characteristic(rho0, &div, &t).unwrap() > 0.0);
            }
        }
    }
}
