//! Batch front end: TOML scenarios, solver dispatch and file output.

pub mod config;
pub mod io;
pub mod run;

pub use config::{Scenario, SimulationConfig, SolverKind};
pub use run::{reflection_table, run, RunReport};
