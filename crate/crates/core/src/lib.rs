//! Bayesian neural networks trained by Langevin-gradient Metropolis–Hastings,
//! with posterior-based pruning and post-prune resampling.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, dataset
//! loading and the experiment runner live in the `bnnprune` companion crate.
//!
//! The typical flow is:
//!
//! 1. build a [`data::Dataset`] and split/normalize it,
//! 2. sample the posterior with [`sampler::sample_chain`],
//! 3. summarize the chain with [`pruning::PosteriorStats`] and build a
//!    [`pruning::PruneMask`],
//! 4. resample the pruned network with [`sampler::resample_chain`],
//! 5. evaluate with [`predictive::posterior_predictive`] and [`metrics`].
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod data;
pub mod diagnostics;
pub mod error;
pub mod math;
pub mod matrix;
pub mod metrics;
pub mod nnet;
pub mod posterior;
pub mod predictive;
pub mod pruning;
pub mod sampler;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use nnet::{ModelSpec, ParamVector, Task};
