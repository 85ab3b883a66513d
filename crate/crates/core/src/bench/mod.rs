//! Dataset loading and the EM vs EM++ benchmark harness.

pub mod dataset;
pub mod experiment;
pub mod synth;
pub mod table;

pub use dataset::{load_dataset, parse_points, read_points, DatasetSource, PointRows};
pub use experiment::{
    improvement, run_experiment, run_on_dataset, run_trial, AlgoSummary, Algorithm, ExperimentSpec,
    TrialRow, TrialStats,
};
pub use synth::{synth_mixture, SynthSpec};
pub use table::{emit_table, render_table, OutputFormat};
