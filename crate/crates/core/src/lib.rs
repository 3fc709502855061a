//! Set-membership reduced-rank LCMV beamforming.
//!
//! The crate provides
//!
//! * [`array_model`]: ULA steering vectors, snapshot generation and covariances,
//! * [`numerics`]: Hermitian positive-definite solve and the closed-form LCMV weight,
//! * [`bounds`]: fixed and parameter-dependent bounds for data-selective updates,
//! * [`beamformers`]: full-rank SG / SM-SG and reduced-rank JIO-SG / JIO-SM-SG,
//! * [`harness`]: the Monte Carlo SINR experiment runner with CSV and SVG output.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod array_model;
pub mod beamformers;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod numerics;

#[cfg(test)]
mod tests;

pub use array_model::{ScenarioConfig, Snapshot, SnapshotGenerator};
pub use beamformers::{Beamformer, JioSmSg, StepOutcome};
pub use bounds::BoundPolicy;
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, SinrCurve};
pub use numerics::{HermitianMatrix, WeightVector};
