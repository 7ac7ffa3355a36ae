//! Special functions and quadrature used by the closed-form expressions.
//!
//! Everything here is a pure function of its arguments. Functions that can
//! leave their supported domain return [`crate::Error::Domain`] instead of a
//! silently wrong number.

mod expint;
mod gamma;
mod hyper;
mod quad;

pub use expint::{e1, exp_integral_ei, expint_en, scaled_e1, scaled_expint_en};
pub use gamma::{ln_factorial, ln_gamma, reg_lower_gamma, reg_upper_gamma};
pub use hyper::{hyp_2f0, tricomi_u};
pub use quad::{gamma_expectation, integrate, integrate_with_breaks, Estimate, QuadratureSpec};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
