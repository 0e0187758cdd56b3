//! Landau-Zener tunneling in n-level systems driven by a time-varying sweep field.
//!
//! The library models an n-level Hamiltonian with nearest-neighbor couplings on
//! a diagonal swept by an external field, propagates the time-dependent
//! Schrödinger equation, and provides closed-form transition probabilities for
//! linear and sinusoidal sweeps together with the numerical oracles that
//! validate them.

pub mod analytic;
pub mod dynamics;
pub mod model;
pub mod morris_shore;
pub mod numerics;
pub mod sweep;
pub mod triangular;

mod error;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

pub use num_complex::Complex64;
