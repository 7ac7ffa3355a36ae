use super::clamp_probability;
use crate::model::SinrParams;
use crate::specfun::{ln_factorial, reg_lower_gamma};
use crate::{Error, Result};

/// Threshold on `X` equivalent to `γ < s`, in units of `scale_x`, or `None`
/// when `s` is at or beyond the ceiling `1/η`.
fn gamma_argument(coef: f64, eta: f64, s: f64) -> Option<f64> {
    let slack = 1.0 - eta * s;
    (slack > 0.0).then(|| coef * s / slack)
}

/// Density of the SINR,
/// `θ'^{n+1} s^n / (1−ηs)^{n+2} · exp(−θ's/(1−ηs)) / n!` with `n = M − K`
/// and `θ' = theta_eff`.
pub fn sinr_pdf(p: &SinrParams, s: f64) -> Result<f64> {
    if !(s >= 0.0) || gamma_argument(p.theta_eff, p.eta, s).is_none() {
        return Err(Error::Domain(format!(
            "SINR {s} outside the support [0, {})",
            p.sinr_ceiling()
        )));
    }
    let n = p.order as f64;
    if s == 0.0 {
        return Ok(if p.order == 0 { p.theta_eff } else { 0.0 });
    }
    let slack = 1.0 - p.eta * s;
    let u = p.theta_eff * s / slack;
    let log = (n + 1.0) * p.theta_eff.ln() + n * s.ln() - (n + 2.0) * slack.ln() - u - ln_factorial(p.order as u64);
    Ok(log.exp())
}

/// `P(γ < s)`: the regularized lower incomplete gamma at `θ's/(1−ηs)`, and 1
/// from the ceiling `1/η` on.
pub fn sinr_cdf(p: &SinrParams, s: f64) -> f64 {
    cdf_with(p.theta_eff, p, s)
}

/// The distribution function with the unscaled `θ` in the exponent, kept for
/// side-by-side reporting against [`sinr_cdf`].
pub fn sinr_cdf_bare_theta(p: &SinrParams, s: f64) -> f64 {
    cdf_with(p.theta, p, s)
}

fn cdf_with(coef: f64, p: &SinrParams, s: f64) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    match gamma_argument(coef, p.eta, s) {
        Some(u) => clamp_probability(reg_lower_gamma(p.shape(), u)),
        None => 1.0,
    }
}

/// Outage probability at threshold `gamma_th` (linear).
pub fn outage(p: &SinrParams, gamma_th: f64) -> f64 {
    sinr_cdf(p, gamma_th)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, QuadratureSpec};

    fn loaded(order: u32) -> SinrParams {
        SinrParams::from_raw(order, 2.5, 0.015, 1.0 / 1.31, 1.31).unwrap()
    }

    #[test]
    fn exponential_special_case() {
        let p = SinrParams::from_raw(0, 0.1, 0.0, 0.5, 2.0).unwrap();
        for s in [0.0, 0.3, 4.0, 40.0] {
            let want = p.theta_eff * (-p.theta_eff * s).exp();
            assert!((sinr_pdf(&p, s).unwrap() - want).abs() <= 1e-14 * want.max(1e-300));
        }
    }

    #[test]
    fn density_integrates_to_one() {
        for order in [0, 3, 40, 90] {
            let p = loaded(order);
            let spec = QuadratureSpec::default();
            let total = integrate(|s| sinr_pdf(&p, s).unwrap_or(0.0), 0.0, p.sinr_ceiling(), &spec).unwrap();
            assert!((total - 1.0).abs() < 1e-8, "order {order}: {total}");
        }
        let free = SinrParams::from_raw(12, 0.1, 0.0, 1.0, 1.0).unwrap();
        let total = integrate(|s| sinr_pdf(&free, s).unwrap(), 0.0, f64::INFINITY, &QuadratureSpec::default()).unwrap();
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn density_is_derivative_of_cdf() {
        let p = loaded(10);
        for k in [0.2, 1.0, 5.0] {
            let s = k / p.theta_eff;
            let h = 1e-5 * s;
            let fd = (sinr_cdf(&p, s + h) - sinr_cdf(&p, s - h)) / (2.0 * h);
            let pdf = sinr_pdf(&p, s).unwrap();
            assert!((fd / pdf - 1.0).abs() < 1e-6, "s={s}: {fd} vs {pdf}");
        }
    }

    #[test]
    fn support_and_ceiling() {
        let p = loaded(5);
        let ceiling = 1.0 / 0.015;
        assert_eq!(sinr_cdf(&p, 0.0), 0.0);
        assert_eq!(outage(&p, 0.0), 0.0);
        assert_eq!(sinr_cdf(&p, ceiling), 1.0);
        assert_eq!(outage(&p, ceiling + 1e-9), 1.0);
        assert!(sinr_pdf(&p, ceiling).is_err());
        assert!(sinr_pdf(&p, -1.0).is_err());
        assert!(sinr_cdf(&p, ceiling * 0.999) < 1.0 + 1e-15);
    }

    #[test]
    fn bare_theta_variant_differs() {
        let p = loaded(5);
        let s = 2.0;
        assert!((sinr_cdf(&p, s) - sinr_cdf_bare_theta(&p, s)).abs() > 1e-3);
        let unit = SinrParams::from_raw(5, 2.5, 0.015, 1.0, 1.0).unwrap();
        assert_eq!(sinr_cdf(&unit, s), sinr_cdf_bare_theta(&unit, s));
    }
}
