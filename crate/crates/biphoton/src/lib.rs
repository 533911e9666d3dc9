//! Two-photon interference in a Mach-Zehnder interferometer.
//!
//! A photon pair entering the two input ports of a Mach-Zehnder
//! interferometer and leaving through the same output port behaves as a
//! single quantum object of twice the photon energy: coincidence fringes in
//! the second arm delay oscillate at `cos(2 ω₀ τ₂)`, i.e. with half the
//! photon wavelength as their path-length period. This crate models that
//! experiment for three pair sources
//!
//! * frequency-entangled SPDC pairs behind identical Gaussian filters,
//!   pumped by a Gaussian pump of arbitrary bandwidth,
//! * two separable photons in identical Gaussian wavepackets,
//! * two distinguishable, orthogonally polarized photons,
//!
//! and provides
//!
//! * closed-form normalized coincidence, coalescence and singles rates
//!   ([`rates`]),
//! * a brute-force numeric oracle that rebuilds every rate as a grid
//!   integral over the eight two-photon detection amplitudes ([`oracle`]),
//! * randomized certification sweeps of the closed forms against the oracle
//!   ([`certify`]),
//! * fringe, envelope and dip analysis of scanned rate curves
//!   ([`analysis`]).
//!
//! All internal quantities are SI: angular frequencies in rad/s, times in
//! seconds, lengths in meters.

pub mod analysis;
pub mod certify;
pub mod interferometer;
pub mod oracle;
pub mod rates;
pub mod sources;
pub mod spectra;

mod error;

pub use error::{Error, Result};

/// Vacuum speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
