//! Exponential integrals.
//!
//! `E_n(x)` uses the ascending series for `x ≤ 1` and the modified-Lentz
//! continued fraction above. Both regimes are cross-checked against each
//! other around the switch and against quadrature of the defining integral.

use super::EULER_GAMMA;
use crate::{Error, Result};

const SWITCH: f64 = 1.0;
const MAX_ITER: usize = 100_000;

fn series_en(n: u32, x: f64) -> f64 {
    let nm1 = n as i64 - 1;
    let mut ans = if nm1 != 0 {
        1.0 / nm1 as f64
    } else {
        -x.ln() - EULER_GAMMA
    };
    let mut fact = 1.0;
    for i in 1..MAX_ITER as i64 {
        fact *= -x / i as f64;
        let del = if i != nm1 {
            -fact / (i - nm1) as f64
        } else {
            let psi = -EULER_GAMMA + (1..=nm1).map(|k| 1.0 / k as f64).sum::<f64>();
            fact * (-x.ln() + psi)
        };
        ans += del;
        if del.abs() < ans.abs() * f64::EPSILON {
            break;
        }
    }
    ans
}

// e^x E_n(x) by continued fraction.
fn scaled_cf_en(n: u32, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + n as f64;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (n as f64 - 1.0 + i as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    h
}

fn check_args(n: u32, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 || (x == 0.0 && n <= 1) {
        return Err(Error::Domain(format!("E_{n}(x) requires x > 0, got {x}")));
    }
    Ok(())
}

/// Scaled generalized exponential integral `e^x E_n(x)`.
///
/// Stays finite where `E_n` underflows; for `n = m + 1` it equals
/// `∫₀^∞ e^{−t} t^m / (m! (t + x)) dt`.
pub fn scaled_expint_en(n: u32, x: f64) -> Result<f64> {
    check_args(n, x)?;
    if n == 0 {
        return Ok(1.0 / x);
    }
    if x == 0.0 {
        return Ok(1.0 / (n as f64 - 1.0));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(if x > SWITCH {
        scaled_cf_en(n, x)
    } else {
        x.exp() * series_en(n, x)
    })
}

/// Generalized exponential integral `E_n(x) = ∫₁^∞ e^{−xt} t^{−n} dt`.
pub fn expint_en(n: u32, x: f64) -> Result<f64> {
    check_args(n, x)?;
    if n == 0 {
        return Ok((-x).exp() / x);
    }
    if x == 0.0 {
        return Ok(1.0 / (n as f64 - 1.0));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(if x > SWITCH {
        (-x).exp() * scaled_cf_en(n, x)
    } else {
        series_en(n, x)
    })
}

/// `E₁(x)` for `x > 0`.
pub fn e1(x: f64) -> Result<f64> {
    expint_en(1, x)
}

/// `e^x E₁(x)` for `x > 0`.
pub fn scaled_e1(x: f64) -> Result<f64> {
    scaled_expint_en(1, x)
}

/// Exponential integral `Ei(x) = −∫_{−x}^∞ e^{−t}/t dt`, supported for
/// negative arguments only, where `Ei(x) = −E₁(−x)`.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if !(x < 0.0) {
        return Err(Error::Domain(format!(
            "Ei(x) is only supported for x < 0, got {x}"
        )));
    }
    Ok(-e1(-x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, QuadratureSpec};
    use approx::assert_relative_eq;

    fn ei_by_quadrature(x: f64) -> f64 {
        // Ei(x) = −∫_{−x}^∞ e^{−t}/t dt
        let spec = QuadratureSpec::new(1e-300, 1e-13, 4000).unwrap();
        let v = integrate(|t| (-t).exp() / t, -x, f64::INFINITY, &spec).unwrap();
        -v
    }

    #[test]
    fn ei_at_minus_one() {
        assert_relative_eq!(exp_integral_ei(-1.0).unwrap(), -0.219_383_934_395_520_27, max_relative = 1e-14);
        assert_relative_eq!(exp_integral_ei(-1.0).unwrap(), ei_by_quadrature(-1.0), max_relative = 1e-12);
    }

    #[test]
    fn ei_decays_to_zero_from_below() {
        let v = exp_integral_ei(-50.0).unwrap();
        assert!(v < 0.0 && v.abs() < 1e-23);
    }

    #[test]
    fn ei_matches_quadrature_on_grid() {
        let mut x = -0.01;
        while x >= -30.0 {
            let v = exp_integral_ei(x).unwrap();
            assert_relative_eq!(v, ei_by_quadrature(x), max_relative = 1e-10);
            x *= 1.37;
        }
    }

    #[test]
    fn regimes_agree_near_switch() {
        for n in [1, 2, 5, 21] {
            for x in [0.6f64, 0.8, 1.0, 1.2, 1.6, 2.0] {
                let series = x.exp() * series_en(n, x);
                let cf = scaled_cf_en(n, x);
                assert_relative_eq!(series, cf, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn log_expectation_is_positive_and_increasing() {
        // −e^{1/a} Ei(−1/a) = E[ln(1 + aX)] for X ~ Exp(1)
        let vals: Vec<f64> = [0.1, 1.0, 10.0]
            .iter()
            .map(|a| scaled_e1(1.0 / a).unwrap())
            .collect();
        assert!(vals[0] > 0.0);
        assert!(vals[0] < vals[1] && vals[1] < vals[2]);
        let spec = QuadratureSpec::default();
        for (a, v) in [0.1, 1.0, 10.0].iter().zip(&vals) {
            let q = integrate(|x| (a * x).ln_1p() * (-x).exp(), 0.0, f64::INFINITY, &spec).unwrap();
            assert_relative_eq!(*v, q, max_relative = 1e-11);
        }
    }

    #[test]
    fn scaled_en_is_laplace_integral() {
        let spec = QuadratureSpec::default();
        for m in [0u32, 3, 12] {
            for y in [0.05, 0.7, 3.0, 400.0] {
                let direct = crate::specfun::gamma_expectation(|t| 1.0 / (t + y), m as f64 + 1.0, &spec).unwrap();
                assert_relative_eq!(scaled_expint_en(m + 1, y).unwrap(), direct, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn rejects_nonnegative_arguments() {
        assert!(exp_integral_ei(0.0).is_err());
        assert!(exp_integral_ei(2.0).is_err());
        assert!(e1(-1.0).is_err());
        assert_eq!(expint_en(3, 0.0).unwrap(), 0.5);
    }
}
