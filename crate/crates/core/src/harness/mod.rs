//! Experiment harness behind the `trapped` binary.

pub mod commands;
pub mod config;
pub mod generators;

pub use commands::{
    cmd_eigen, cmd_export, cmd_oracle, cmd_solve, cmd_theorem1, cmd_verify, exit_code, Check, OracleTable,
    Outcome, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_IO, EXIT_OK,
};
pub use config::{EstimateForm, ExperimentConfig, GeneratorKind, Harmonic};
pub use generators::{bump, generate, grid_for, random_bump, random_polynomial_field, Generated};
