//! Experiment runner for the stochlab constructions: configuration,
//! plain-text artifacts and requirement reports.

pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod run;

pub use config::{ExperimentConfig, ExperimentKind, Sizing};
pub use error::{LabError, LabResult};
pub use io::{load_bitset, load_permutation, save_bitset, save_permutation, save_trace, TraceRow};
pub use report::{Check, Report};
pub use run::run_experiment;
