//! Command line front end: CCDF tables, duplex-mix sweeps and the
//! analytic-versus-simulation validation harness.
//!
//! Every CSV written here has a fixed, versioned column list (the
//! `*_COLUMNS_V1` constants) and carries no timestamps or timings, so a rerun
//! with the same config and seed reproduces the file byte for byte.

pub mod commands;
pub mod config;
pub mod engine;
pub mod error;
pub mod evaluate;
pub mod grid;
pub mod sweep;
pub mod validate;

#[cfg(test)]
mod e2e;

pub use commands::{main_with, Cli};
pub use config::load_config;
pub use engine::Engine;
pub use error::{exit, CliError, Result};
pub use evaluate::{evaluate, CcdfTable, CCDF_COLUMNS_V1};
pub use grid::DbGrid;
pub use sweep::{run_plan, run_sweep, SweepPlan, SweepResult, CURVE_COLUMNS_V1, SWEEP_COLUMNS_V1};
pub use validate::{validate, ValidationReport, BAND, VALIDATE_COLUMNS_V1};
