//! Verification of AKLT states on graphs with local spin measurements.
//!
//! The crate covers spin algebra, AKLT Hamiltonians and their gaps, weighted
//! point sets on the sphere, bond tests, matching-based verification
//! protocols with optimized test probabilities, and a Monte-Carlo simulator
//! of the resulting measurement procedure.

pub mod bond;
pub mod error;
pub mod graphs;
pub mod hamiltonian;
pub mod linalg;
pub mod protocol;
pub mod report;
pub mod simulator;
pub mod sphere;
pub mod spin;
pub mod tables;

pub use error::{Error, Result};
