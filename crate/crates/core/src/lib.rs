//! Beamforming and performance analysis for RIS-aided MISO links under
//! Rician fading.
//!
//! The crate is organised around the life of one scenario:
//!
//! - [`channel`] builds the deterministic line-of-sight geometry and draws
//!   fading realizations.
//! - [`beamforming`] computes the closed-form statistical-CSI beamformer and
//!   RIS phase vector, the exact mean SNR, and the two alternating baselines
//!   (exact mean-SNR maximization and per-realization SNR maximization).
//! - [`analysis`] evaluates the Rice statistics of the effective gain, the
//!   Marcum Q-function, outage probability and ergodic capacity.
//! - [`montecarlo`] estimates outage and capacity empirically and checks the
//!   distributional claims behind the analysis.
//! - [`experiments`] assembles the sweep tables the CLI writes out.

// Parameter checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod beamforming;
pub mod channel;
mod error;
pub mod exec;
pub mod experiments;
pub mod invariants;
pub mod montecarlo;
pub mod rng;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Complex column vector used throughout the crate.
pub type CVector = nalgebra::DVector<Complex64>;
/// Complex dense matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
