//! End-to-end experiments on the built-in example and user-supplied states.

pub mod config;
pub mod counterexample;
pub mod experiment;

pub use config::{CoefficientRoute, ExperimentConfig, StateSource, BOUND_RTOL, GRID_SLACK};
pub use counterexample::{counterexample_norms, CounterexampleReport, CounterexampleRow, SpotCheck};
pub use experiment::{
    response_bound_checks, run_experiment, trace_consistency, trace_monotonicity, BoundCheck, Experiment,
    ExperimentOutcome, ExperimentReport, TraceError,
};
