//! Experiment orchestration for the radial Euler solver: configuration
//! documents, initial-data families, parallel sweeps and run artefacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod execute;
pub mod output;
pub mod profile;

pub use config::{parse_config, ConfigError, ExperimentConfig, InitialProfile, RunSpec, SweepSpec};
pub use execute::{execute, execute_with, exit_code, RunRecord};
pub use profile::{build_initial_profile, InitialData};
