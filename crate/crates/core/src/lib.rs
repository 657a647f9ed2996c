//! Zak-OTFS link simulation.
//!
//! The crate covers the delay-Doppler (DD) frame, its frequency-domain (FD)
//! image under the inverse discrete frequency Zak transform, doubly-spread
//! channels seen through pulse shaping, FD equalization with a banded
//! conjugate-gradient LMMSE solver, spread-pilot channel estimation with
//! turbo refinement, OFDM baselines, and a seeded Monte-Carlo harness.

pub mod baselines;
pub mod channel;
pub mod constellation;
pub mod equalizer;
mod error;
pub mod estimation;
pub mod grid;
pub mod linalg;
pub mod sim;
pub mod zak;

pub use error::{Error, Result};
pub use grid::GridParams;
pub use num_complex::Complex64;
