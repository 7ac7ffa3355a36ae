//! Closed-form performance of the ZF uplink and the quadrature oracles used
//! to check them.
//!
//! Everything is a pure function of [`SinrParams`] (or of the profile, for
//! the deterministic large-`M` regimes), so grids can be evaluated in
//! parallel without coordination.

mod asymptotic;
mod distribution;
mod mgf;
mod rate;
mod ser;

pub use asymptotic::{
    asymptotic_sinr, fixed_ratio_sinr, power_scaled_sinr, spectral_ceiling, spectral_efficiency,
};
pub use distribution::{outage, sinr_cdf, sinr_cdf_bare_theta, sinr_pdf};
pub use mgf::{mgf, mgf_closed_form, mgf_printed_kappa, mgf_quadrature};
pub use rate::{rate_closed, rate_closed_literal, rate_quadrature, LITERAL_RATE_MAX_ORDER};
pub use ser::{qam_gain, ser_exact, ser_from_mgf, ser_upper, ser_upper_coefficients, ser_upper_from_mgf};

pub(crate) fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}
