use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::{clamp_probability, mgf};
use crate::model::{SinrParams, SUPPORTED_QAM};
use crate::specfun::{integrate, QuadratureSpec};
use crate::{Error, Result};

fn check_order(qam_order: u32) -> Result<f64> {
    if SUPPORTED_QAM.contains(&qam_order) {
        Ok(qam_order as f64)
    } else {
        Err(Error::UnsupportedQam(qam_order))
    }
}

/// `g = 3/(2(𝓜−1))`.
pub fn qam_gain(qam_order: u32) -> Result<f64> {
    let m = check_order(qam_order)?;
    Ok(1.5 / (m - 1.0))
}

/// Weights of `Φ(g)`, `Φ(4g/3)` and `Φ(2g)` in the three-term expression.
pub fn ser_upper_coefficients(qam_order: u32) -> Result<[f64; 3]> {
    let m = check_order(qam_order)?;
    let sq = m.sqrt();
    Ok([
        5.0 / (3.0 * sq) - 1.0 / m - 2.0 / 3.0,
        1.0 - 1.0 / sq,
        2.0 / sq - 1.0 - 1.0 / m,
    ])
}

/// Square-QAM SER from any MGF via the finite-range integral
/// `(4/π)q[∫₀^{π/2} Φ(g/sin²φ)dφ − q∫₀^{π/4} Φ(g/sin²φ)dφ]`, `q = 1 − 1/√𝓜`.
pub fn ser_from_mgf<F: Fn(f64) -> Result<f64>>(qam_order: u32, phi: F) -> Result<f64> {
    let g = qam_gain(qam_order)?;
    let q = 1.0 - 1.0 / (qam_order as f64).sqrt();
    let spec = QuadratureSpec::new(1e-14, 1e-10, 2000)?;
    // `integrate` takes a plain closure, so errors are parked and re-raised.
    let failure = std::cell::RefCell::new(None);
    let integrand = |angle: f64| {
        let sin = angle.sin();
        if sin <= 0.0 {
            return 0.0;
        }
        phi(g / (sin * sin)).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            0.0
        })
    };
    let first = integrate(integrand, 0.0, FRAC_PI_4, &spec)?;
    let second = integrate(integrand, FRAC_PI_4, FRAC_PI_2, &spec)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(clamp_probability(4.0 / PI * q * (first + second - q * first)))
}

/// Three-term expression `c₁Φ(g) + c₂Φ(4g/3) + c₃Φ(2g)` for any MGF.
pub fn ser_upper_from_mgf<F: Fn(f64) -> Result<f64>>(qam_order: u32, phi: F) -> Result<f64> {
    let g = qam_gain(qam_order)?;
    let [c1, c2, c3] = ser_upper_coefficients(qam_order)?;
    Ok(clamp_probability(
        c1 * phi(g)? + c2 * phi(4.0 * g / 3.0)? + c3 * phi(2.0 * g)?,
    ))
}

/// Average SER of square `qam_order`-QAM.
pub fn ser_exact(p: &SinrParams, qam_order: u32) -> Result<f64> {
    ser_from_mgf(qam_order, |s| mgf(p, s))
}

/// The three-term closed-form SER expression advertised as an upper bound.
///
/// It is not one in general: at zero SINR it gives `8/(3√𝓜) − 2/𝓜 − 2/3`
/// (1/6 for 4-QAM, negative from 16-QAM on) instead of `1 − 1/𝓜`, and on
/// typical operating points it falls below [`ser_exact`].
pub fn ser_upper(p: &SinrParams, qam_order: u32) -> Result<f64> {
    ser_upper_from_mgf(qam_order, |s| mgf(p, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, QuadratureSpec};

    #[test]
    fn qpsk_gain() {
        assert_eq!(qam_gain(4).unwrap(), 0.5);
        assert!(qam_gain(8).is_err());
    }

    #[test]
    fn coefficient_sum() {
        let m = 4f64;
        let c = ser_upper_coefficients(4).unwrap();
        let want = (5.0 / (3.0 * m.sqrt()) - 1.0 / m - 2.0 / 3.0) + (1.0 - 1.0 / m.sqrt()) + (2.0 / m.sqrt() - 1.0 - 1.0 / m);
        assert!((c.iter().sum::<f64>() - want).abs() < 1e-15);
        // Φ ≡ 1 collapses onto the coefficient sum
        assert!((want - 1.0 / 6.0).abs() < 1e-15);
        assert!((ser_upper_from_mgf(4, |_| Ok(1.0)).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        // exact SER at zero SINR is 1 − 1/𝓜
        assert!((ser_from_mgf(4, |_| Ok(1.0)).unwrap() - 0.75).abs() < 1e-12);
        // from 16-QAM on the sum is negative and clamps to zero
        let c16 = ser_upper_coefficients(16).unwrap();
        assert!((c16.iter().sum::<f64>() + 0.125).abs() < 1e-15);
        assert_eq!(ser_upper_from_mgf(16, |_| Ok(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn awgn_qpsk_matches_q_function() {
        // Φ(s) = e^{−sγ} for a fixed SNR γ: SER = 2Q(√γ) − Q(√γ)²
        let gamma = 4.0f64;
        let ser = ser_from_mgf(4, |s| Ok((-s * gamma).exp())).unwrap();
        let q = |x: f64| {
            integrate(|t| (-t * t / 2.0).exp(), x, f64::INFINITY, &QuadratureSpec::default()).unwrap()
                / (2.0 * PI).sqrt()
        };
        let qv = q(gamma.sqrt());
        assert!((ser - (2.0 * qv - qv * qv)).abs() < 1e-10);
    }

    #[test]
    fn rayleigh_qpsk_average() {
        // Φ(s) = 1/(1+sγ̄): average the AWGN SER over an exponential SNR
        let mean = 10.0f64;
        let ser = ser_from_mgf(4, |s| Ok(1.0 / (1.0 + s * mean))).unwrap();
        let full = integrate(
            |x| {
                let gamma = x * mean;
                let qv = 0.5 * libm_erfc((gamma / 2.0).sqrt());
                (2.0 * qv - qv * qv) * (-x).exp()
            },
            0.0,
            f64::INFINITY,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((ser - full).abs() < 1e-9, "{ser} vs {full}");
    }

    /// erfc by quadrature, good to ~1e-13 on the range used here.
    fn libm_erfc(x: f64) -> f64 {
        2.0 / PI.sqrt() * integrate(|t| (-t * t).exp(), x, f64::INFINITY, &QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn propagates_mgf_errors() {
        let res = ser_from_mgf(16, |_| Err(Error::Domain("boom".into())));
        assert!(matches!(res, Err(Error::Domain(_))));
        assert!(ser_from_mgf(8, |_| Ok(1.0)).is_err());
    }
}
