//! Experiment orchestration: spec files, deterministic seed derivation,
//! parallel execution, and report emission, plus the command-line surface.

pub mod cli;
pub mod compare;
pub mod experiment;
pub mod seed;
pub mod spec;

pub use cli::cli;
pub use compare::{
    compare_runsets, split_by_gauge_half, write_compare_report, CompareOptions, CompareReport,
    CompareRow,
};
pub use experiment::{run_experiment, ExperimentOutcome};
pub use seed::SeedMixer;
pub use spec::{load_spec, parse_topology, ExperimentSpec, MethodKind, MethodSpec};
