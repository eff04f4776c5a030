//! Dense complex state-vector engine for a handful of labelled qubits.
//!
//! Basis indices are big-endian in label order. All operations are pure;
//! randomness only enters through a caller-supplied generator.

mod density;
mod measure;
mod operator;
mod state;

pub use density::{fidelity, fidelity_mixed, hs_distance, partial_trace, DensityMatrix};
pub(crate) use measure::sample_record;
pub use measure::{
    enumerate_outcomes, measure, BasisKind, BellState, MeasurementBasis, MeasurementRecord,
};
pub use operator::{apply_on, gates, Operator, UNITARITY_TOLERANCE};
pub use state::{tensor, StateVector, NORMALIZATION_TOLERANCE};

pub use num_complex::Complex64;

/// Shorthand for a real amplitude.
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
