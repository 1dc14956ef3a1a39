//! Impairment-detection pipeline library.
//!
//! Three pieces:
//! - an offline classification suite: a synthetic BAC/pulse-rate dataset
//!   generator, 23 named classifier presets built from scratch, and a
//!   stratified five-fold cross-validation harness with a leaderboard;
//! - a deterministic simulator of the bracelet's sense → filter → decide →
//!   alert loop;
//! - seed-derivation plumbing so every run is reproducible from one seed.

pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod rng;
pub mod sim;

pub mod classifiers;

pub use dataset::{Dataset, GeneratorConfig, Sample};
pub use error::Error;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
