//! Radial-symmetry compressible Euler and repulsive Euler-Poisson solver with
//! finite-time blowup diagnostics.
//!
//! Solutions with compact support in `[0, R]` and `H₀ = ∫_0^R r V₀ dr > 0`
//! lose `C¹` regularity no later than `T = R³ / (2H₀)`. The [`run`] driver
//! integrates such data with a conservative finite-volume scheme, flags the
//! first singularity symptom and checks it against `T`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characteristics;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod poisson;
mod run;
pub mod solver;

pub use diagnostics::{
    blowup_bound, cauchy_schwarz_gap, energy_condition, envelope, functional_h, mass, riccati_residual,
    DiagnosticsSeries, RunReport, Verdict,
};
pub use error::{Error, Result};
pub use model::{pressure, sound_speed, validate_initial_data, FluidState, ModelConfig, RadialGrid, ValidationReport};
pub use poisson::{alpha, radial_field, FieldProfile};
pub use run::{run, RunOutput};
pub use solver::{NumericsConfig, Solver, Steepening, Termination, TimeStep, Trajectory};
