//! Simulation of absorption spectroscopy with a bright squeezed frequency comb.
//!
//! A squeezed coherent carrier is phase modulated into a comb of teeth at
//! `ω₀ ± nΩ` with Bessel amplitudes `J_n(M)`, transmitted through a gas cell
//! and read out on a balanced homodyne detector followed by a spectrum
//! analyzer. The crate computes, per sideband pair `n`:
//!
//! * the gas response of every tooth from HITRAN line parameters
//!   ([`hitran`], [`lineshape`]),
//! * the comb amplitudes and squeezing conventions ([`comb`]),
//! * the mean spectral power, its variance and the signal-to-noise ratio
//!   with and without squeezing ([`response`]),
//! * the recovery of per-tooth transmissions from an LO phase sweep
//!   ([`inversion`]),
//! * a seeded stochastic model of the spectral power used to check the
//!   analytic moments ([`montecarlo`]).
//!
//! ```
//! use sqcomb::comb::{squeeze_db_to_s, CombConfig};
//! use sqcomb::response::{snr_table, ToothResponse};
//!
//! let comb = CombConfig {
//!     squeeze_s: squeeze_db_to_s(10.0).unwrap(),
//!     ..CombConfig::default()
//! };
//! let teeth: Vec<_> = (0..=comb.max_index()).map(ToothResponse::lossless).collect();
//! let rows = snr_table(&teeth, &comb).unwrap();
//! assert!((rows[1].advantage - 10.0).abs() < 1e-9);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comb;
pub mod error;
pub mod hitran;
pub mod inversion;
pub mod lineshape;
pub mod montecarlo;
pub mod numerics;
pub mod response;

pub use error::{Error, Result};

/// Speed of light in vacuum, cm/s.
pub const SPEED_OF_LIGHT_CM_S: f64 = 2.997_924_58e10;
