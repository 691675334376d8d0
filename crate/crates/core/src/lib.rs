//! Secrecy-rate beamforming for a MIMO information/energy broadcast link.
//!
//! A transmitter with `N_T` antennas serves an information receiver (IR)
//! while a multi-antenna energy receiver (ER) must harvest at least `P_E`
//! watts and may also eavesdrop. The crate maximizes the secrecy rate
//! `log det(I + H_I V V^H H_I^H) - log det(I + H_E V V^H H_E^H)` under a
//! total-power budget `P_T` and the harvesting constraint:
//!
//! * [`global`] solves the single-stream and the degraded full-stream cases
//!   to global optimality;
//! * [`ibcd`] handles any stream count with an inexact block coordinate
//!   descent on a weighted-MMSE reformulation;
//! * [`anopt`] extends the descent to joint beamforming and artificial noise.
//!
//! All numerical code is generic over [`Real`]; the `f64` aliases below are
//! what the harness uses.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anopt;
pub mod error;
pub mod global;
pub mod ibcd;
pub mod matcore;
pub mod model;
pub mod scalar;
pub mod sdp;

pub use error::{Error, Result};
pub use matcore::ComplexMatrix;
pub use scalar::Real;

/// Complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix over `f64`.
pub type CMat = ComplexMatrix<f64>;
pub type ChannelPair = model::ChannelPair<f64>;
pub type DesignBudget = model::DesignBudget<f64>;
pub type Beamformer = model::Beamformer<f64>;
pub type AnBeamformer = model::AnBeamformer<f64>;
pub type SdpProblem = sdp::SdpProblem<f64>;
pub type SdpSolution = sdp::SdpSolution<f64>;
pub type ConvergenceTrace = ibcd::ConvergenceTrace<f64>;
