//! Scans over time steps and subspace sizes driven by a JSON configuration.

mod config;
mod report;
mod run;

pub use config::{
    derive_seed, BackendConfig, Diagonalization, ExperimentConfig, GridConfig, Method, ReadoutMode, Reference,
    SolvePath, System, SystemSource, VffSettings,
};
pub use report::{gate_counts, gate_counts_csv, GateCountRow};
pub use run::{build_propagator, dump_matrices, run_experiment, vff_model, ExperimentResult, ResultRow};
