//! Bit-exact models of approximate low-width multipliers, exhaustive error
//! analysis, two-level logic synthesis, and quantized-DNN evaluation of
//! multiplier substitution.

pub mod aggregate;
pub mod error;
pub mod logicsynth;
pub mod metrics;
pub mod mulcore;
pub mod rng;

pub use error::{Error, Result};
