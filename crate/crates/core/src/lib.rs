//! Behavioral model of an MTJ-based analog-to-stochastic converter.
//!
//! The crate covers four layers:
//!
//! * [`device`] — closed-form spin-transfer-torque switching physics of a
//!   magnetic tunnel junction: critical currents, switching time constant,
//!   switching probability, bias-dependent resistance, and Monte-Carlo state
//!   sampling.
//! * [`converter`] — the conversion chain from an analog photocurrent to a
//!   Bernoulli bit stream: logarithmic sensor, write current, the attempt
//!   time that makes the conversion linear, and the write/set/erase cycle.
//! * [`calibration`] — resistance-variability modeling, closed-form
//!   compensation of the attempt time and bias voltage, and an empirical
//!   count-and-compare calibration loop that recovers both from bit
//!   statistics alone.
//! * [`bitstream`] / [`kernels`] — stochastic-computing arithmetic
//!   (AND multiply, correlated-XOR absolute difference, MUX scaled add) and
//!   a Roberts-cross edge detector with a bit-exact binary reference
//!   pipeline for error-robustness studies.
//!
//! Supporting modules handle deterministic counter-addressable random
//! streams ([`rng`]), plain-text configuration ([`config`]), CSV sweep
//! emission ([`sweep`]) and PGM image I/O ([`pgm`]).
//!
//! All closed-form math is generic over the scalar type through the
//! [`num::Real`] trait; `f64` aliases for the parameter types are exported
//! at the crate root.

// Validation code writes `!(x > 0)` on purpose: NaN must count as a
// violation, which `x <= 0` would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bitstream;
pub mod calibration;
pub mod config;
pub mod converter;
pub mod device;
pub mod error;
pub mod io;
pub mod kernels;
pub mod num;
pub mod pgm;
pub mod rng;
pub mod sweep;

pub use error::{Error, Result};

/// MTJ device constants with `f64` scalars.
pub type MtjParams64 = device::MtjParams<f64>;
/// MTJ device constants with `f32` scalars.
pub type MtjParams32 = device::MtjParams<f32>;
/// Sensor operating point with `f64` scalars.
pub type SensorParams64 = converter::SensorParams<f64>;
/// Converter operating point with `f64` scalars.
pub type ConverterConfig64 = converter::ConverterConfig<f64>;
/// Variability model with `f64` scalars.
pub type VariabilityModel64 = calibration::VariabilityModel<f64>;
/// Calibration outcome with `f64` scalars.
pub type CalibrationResult64 = calibration::CalibrationResult<f64>;
