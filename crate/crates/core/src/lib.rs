//! Joint optimization of intelligent-reflective-surface (IRS) phase vectors
//! and NOMA downlink transmit powers from statistical channel information.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`] — dense complex linear algebra (Hermitian eigendecomposition,
//!   null spaces, linear solves, Hadamard products)
//! - [`channel`] — statistical channel synthesis: sparse-path covariances,
//!   rank-controlled BS-IRS matrices, instantaneous sampling
//! - [`zeroforcing`] — covariance-eigenspace zeroforcing transmit beams
//! - [`irs_opt`] — per-pair IRS phase optimization: fractional SINR objective,
//!   unconstrained eigen-baseline, Dinkelbach outer loop with an ADMM
//!   constant-modulus inner solver
//! - [`power_alloc`] — strong-user closed-form powers, max-min SINR balancing
//!   via a nonnegative eigenproblem, minimum-power linear solve
//! - [`joint`] — the alternating joint loop producing minimum-total-power
//!   solutions under per-user SINR thresholds
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature
//! (default) only adds `std::error::Error` integration.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod channel;
pub mod error;
pub mod irs_opt;
pub mod joint;
pub mod numerics;
pub mod power_alloc;
pub mod zeroforcing;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
