//! Simulator and analytics for a W-state controlled QSDC protocol with a
//! two-parameter symmetric cloning machine.
//!
//! Qubit indices are big-endian in label order everywhere.

pub mod cloning;
pub mod entanglement;
pub mod error;
pub mod kernel;
pub mod protocol;
pub mod report;
pub mod tradeoff;

pub use error::{Error, Result};
