//! Time-modulated array (TMA) harmonic beamforming toolkit.
//!
//! A TMA replaces phase shifters with periodic modulation of the element
//! excitations, which creates steerable radiation patterns at harmonics of
//! the modulation frequency. This crate implements three architectures —
//! switched rectangular pulses, sum-of-weighted-cosines (SWC) pulses, and a
//! preprocessed single-sideband (SSB) scheme — and everything needed to
//! analyze them:
//!
//! * [`pulse`]: modulating waveforms and their Fourier coefficients, with
//!   brute-force spectral oracles,
//! * [`synthesis`]: excitation grids, tapers, steering phases and delays,
//! * [`metrics`]: array factors, sidelobe level, beamwidth, efficiency,
//!   directivity, specular symmetry,
//! * [`sim`]: sample-level receive-chain simulation and harmonic
//!   demultiplexing,
//! * [`config`] / [`report`]: the TOML-driven CLI workflows.
//!
//! Units are normalized throughout: `T_0 = 1`, `omega_0 = 2 pi`, element
//! positions in wavelengths, carrier at complex-baseband zero.

pub mod config;
pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod pulse;
pub mod report;
pub mod sim;
pub mod synthesis;

pub use error::{Result, TmaError};
pub use model::{ArrayGeometry, ExcitationGrid, HarmonicBand, Provenance};
