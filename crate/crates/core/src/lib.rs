//! Quantum battery charging protocols: construction, exact evolution and spectral
//! certification of universally-charging behavior, Haar averages of the energy change,
//! and the flow index of banded unitaries on energy ladders.

pub mod error;
pub mod quantum;

pub use error::{Error, Result};
pub mod battery;
pub mod cli;
pub mod haar;
pub mod protocols;
pub mod qubit;
pub mod topology;
