//! Files, datasets, configuration and the multi-run experiment driver for
//! `bnnprune-core`.

pub mod config;
pub mod datasets;
pub mod error;
pub mod experiment;
pub mod io;

pub use config::ExperimentConfig;
pub use error::{Error, Result, Stage, StageError};
pub use experiment::{run_experiment, run_pipeline, Experiment, RunResult};
