//! Uplink zero-forcing analysis for multicell massive MIMO with imperfect CSI.
//!
//! The crate pairs a matrix-level Monte-Carlo simulator of the
//! pilot-contaminated estimation and detection chain with the closed-form
//! SINR distribution, achievable rate, outage probability and symbol error
//! rate of the ZF receiver. Every closed form has an independent quadrature
//! or simulation path so the two can be checked against each other.
//!
//! Layout:
//! - [`model`]: configuration, large-scale fading profiles, per-user analytic parameters.
//! - [`specfun`]: exponential integrals, incomplete gamma, ₂F₀ / Tricomi U, adaptive quadrature.
//! - [`channel`]: fast-fading draws, pilot observation, MMSE estimation.
//! - [`zf`] and [`qam`]: ZF receiver, instantaneous SINR, square QAM.
//! - [`analytic`]: closed-form performance expressions and their quadrature oracles.
//! - [`montecarlo`]: seeded, order-independent parallel trial orchestration.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod qam;
pub mod specfun;
pub mod zf;

pub use error::{Error, Result};
pub use model::{FadingProfile, SinrParams, SystemConfig};

/// Converts a decibel value to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
