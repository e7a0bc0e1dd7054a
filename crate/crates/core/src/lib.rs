//! Quantitative group testing with bundle-augmented sparse graphs.
//!
//! * [`graph`] builds the regular ensemble and its flat test matrix.
//! * [`model`] samples defectives and computes test outcomes.
//! * [`decoder`] runs lower/upper-bound message passing.
//! * [`de`] predicts asymptotic behavior by density evolution.
//! * [`sim`] is a seeded Monte Carlo harness.
//!
//! Defect probabilities are plain probabilities throughout the library;
//! only the command-line front end speaks percent.

pub mod de;
pub mod decoder;
pub mod error;
pub mod graph;
pub mod model;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
