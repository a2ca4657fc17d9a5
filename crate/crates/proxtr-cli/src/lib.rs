//! Command-line front end: run experiments from a JSON config with flag
//! overrides, reproduce the hard-instance iteration counts, emit CSV data for
//! plots, and print complexity-bound values.
//!
//! Exit codes: 0 success, 1 verification mismatch or invalid input,
//! 2 non-convergence, 3 output I/O failure.

pub mod builtins;
pub mod commands;
pub mod config;
pub mod logfmt;

pub use commands::{cmd_bounds, cmd_emit, cmd_solve, cmd_verify};
pub use config::{ExperimentConfig, FlagOverrides, PolicyChoice, ProblemChoice, SubsolverChoice};
