//! Entropic quantum-correlation measures for two-qubit states.
//!
//! The crate computes quantum mutual information, one-way discord in both
//! directions, measurement-induced disturbance (MID), its ameliorated
//! variant (AMID) and the classical mutual information, and traces the
//! states that maximise discord or AMID at fixed von Neumann entropy.


pub mod campaign;
pub mod error;
pub mod extremal;
pub mod io;


pub mod linalg;
pub mod measurement;
pub mod measures;


pub mod optimize;
pub mod states;

pub use error::{Error, Rejection, Result};
pub use linalg::{Mat2, Mat4, Subsystem, C64};
pub use states::{bloch_normal_form, BlochForm, DensityMatrix, PauliExpansion, Provenance};
pub use measurement::{LocalMeasurement, MeasurementParams};
pub use measures::{full_report, CorrelationReport};
