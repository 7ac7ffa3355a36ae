use crate::model::SinrParams;
use crate::specfun::{gamma_expectation, hyp_2f0, ln_factorial, QuadratureSpec};
use crate::{Error, Result};

/// Worst tolerated ratio of `Σ|terms|` to the result in the binomial form.
const MAX_AMPLIFICATION: f64 = 1e5;

fn check_s(s: f64) -> Result<()> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("MGF argument must be nonnegative, got {s}")));
    }
    Ok(())
}

fn binomial(n: u32, k: u32) -> f64 {
    (ln_factorial(n as u64) - ln_factorial(k as u64) - ln_factorial((n - k) as u64))
        .exp()
        .round()
}

/// `Σ_p C(n+1, p) (−r)^p ₂F₀(n+1, p; −; −w)`, returning the sum and
/// `Σ|terms|`.
fn binomial_series(shape: u32, r: f64, w: f64) -> Result<(f64, f64)> {
    let (mut sum, mut abs) = (0.0, 0.0);
    for p in 0..=shape {
        let term = binomial(shape, p) * r.powi(p as i32) * hyp_2f0(shape as i64, p as i64, -w)?;
        let signed = if p % 2 == 0 { term } else { -term };
        sum += signed;
        abs += term.abs();
    }
    Ok((sum, abs))
}

/// `E[e^{−sγ}]` in the binomial/₂F₀ form, with `c = scale_x·s`,
/// `r = c/(θ+c)` and `w = kappa_eff/(θ+c)`.
pub fn mgf_closed_form(p: &SinrParams, s: f64) -> Result<f64> {
    check_s(s)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let c = p.scale_x * s;
    let denom = p.theta + c;
    if p.eta == 0.0 {
        return Ok((p.theta / denom).powi(p.shape() as i32));
    }
    binomial_series(p.shape(), c / denom, p.kappa_eff / denom).map(|(v, _)| v)
}

/// The same binomial form with the ₂F₀ argument `−κβ̂s/(β̂θ + β²)` and
/// `κ = (τ_u P_u β̂ + 1)/(τ_u P_u β̂)`, kept for side-by-side reporting.
pub fn mgf_printed_kappa(p: &SinrParams, s: f64, pilot_energy: f64) -> Result<f64> {
    check_s(s)?;
    let beta_sq = p.scale_x * p.beta_hat;
    let kappa = (pilot_energy * p.beta_hat + 1.0) / (pilot_energy * p.beta_hat);
    let r = beta_sq * s / (beta_sq * s + p.beta_hat * p.theta);
    let z = -kappa * p.beta_hat * s / (p.beta_hat * p.theta + beta_sq);
    binomial_series(p.shape(), r, -z).map(|(v, _)| v)
}

/// Oracle: `∫ (y/(y + scale_x s))^{n+1} p_Y(y) dy` where `Y − θ` is
/// Gamma(n+1, kappa_eff), by adaptive quadrature.
pub fn mgf_quadrature(p: &SinrParams, s: f64) -> Result<f64> {
    check_s(s)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let c = p.scale_x * s;
    let shape = p.shape() as f64;
    if p.eta == 0.0 {
        return Ok((shape * (-c / (p.theta + c)).ln_1p()).exp());
    }
    // 1e-11 sits just above the round-off floor of far-tail evaluations
    let spec = QuadratureSpec::new(1e-300, 1e-11, 4000)?;
    let (theta, kappa) = (p.theta, p.kappa_eff);
    gamma_expectation(
        |t| {
            let y = theta + kappa * t;
            (shape * (-c / (y + c)).ln_1p()).exp()
        },
        shape,
        &spec,
    )
}

/// MGF of the SINR. Uses the closed form unless its alternating sum could
/// amplify rounding error past [`MAX_AMPLIFICATION`], then quadrature.
pub fn mgf(p: &SinrParams, s: f64) -> Result<f64> {
    check_s(s)?;
    if s == 0.0 || p.eta == 0.0 {
        return mgf_closed_form(p, s);
    }
    // Σ|terms| ≤ (1+r)^{n+1}, and Jensen gives Φ(s) ≥ exp(−s·E[γ]).
    let c = p.scale_x * s;
    let r = c / (p.theta + c);
    let mean_bound = p.sinr_ceiling().min(p.mean_x() / p.theta);
    let log_amp = p.shape() as f64 * r.ln_1p() + s * mean_bound;
    if log_amp > MAX_AMPLIFICATION.ln() {
        return mgf_quadrature(p, s);
    }
    let (sum, abs) = binomial_series(p.shape(), r, p.kappa_eff / (p.theta + c))?;
    if abs > MAX_AMPLIFICATION * sum.abs() {
        return mgf_quadrature(p, s);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::estimation_error_traces;
    use crate::model::{derive_sinr_params, fixed_cross_gain_profile, SystemConfig};

    fn acceptance_point() -> SinrParams {
        let cfg = SystemConfig::reference(50);
        let profile = fixed_cross_gain_profile(&cfg, 0.1).unwrap();
        let alpha = estimation_error_traces(&cfg, &profile, 0).unwrap();
        derive_sinr_params(&cfg, &profile, 0, 0, &alpha).unwrap()
    }

    #[test]
    fn parameters_of_reference_point() {
        let p = acceptance_point();
        assert!((p.theta - 9.41677018633540).abs() < 1e-12);
        assert!((p.eta - 0.06).abs() < 1e-15);
        assert!((p.scale_x - 0.621118012422360).abs() < 1e-14);
    }

    #[test]
    fn reference_values() {
        // high-precision evaluation of the Gamma-mixture integral
        let p = acceptance_point();
        let want = [
            (0.5, 0.317457756452902550766),
            (1.5, 0.0351354561990012278),
            (3.0, 0.00159619700235784043),
        ];
        for (s, v) in want {
            let closed = mgf_closed_form(&p, s).unwrap();
            let quad = mgf_quadrature(&p, s).unwrap();
            let routed = mgf(&p, s).unwrap();
            assert!((closed / v - 1.0).abs() < 1e-6, "closed s={s}: {closed}");
            assert!((quad / v - 1.0).abs() < 1e-10, "quad s={s}: {quad}");
            assert!((routed / v - 1.0).abs() < 1e-9, "routed s={s}: {routed}");
        }
    }

    #[test]
    fn origin_and_monotonicity() {
        let p = acceptance_point();
        assert_eq!(mgf(&p, 0.0).unwrap(), 1.0);
        assert_eq!(mgf_quadrature(&p, 0.0).unwrap(), 1.0);
        let mut last = 1.0;
        for i in 1..30 {
            let v = mgf(&p, 0.25 * i as f64).unwrap();
            assert!(v <= last && v > 0.0);
            last = v;
        }
        assert!(mgf(&p, -1.0).is_err());
    }

    #[test]
    fn interference_free_closed_form() {
        let p = SinrParams::from_raw(6, 0.1, 0.0, 0.8, 1.25).unwrap();
        let s = 0.7;
        let want = (0.1f64 / (0.1 + 0.8 * s)).powi(7);
        assert!((mgf(&p, s).unwrap() / want - 1.0).abs() < 1e-14);
        assert!((mgf_quadrature(&p, s).unwrap() / want - 1.0).abs() < 1e-13);
    }

    #[test]
    fn printed_kappa_is_a_different_function() {
        let p = acceptance_point();
        let printed = mgf_printed_kappa(&p, 1.5, 100.0).unwrap();
        let exact = mgf_quadrature(&p, 1.5).unwrap();
        assert!((printed / exact - 1.0).abs() > 1e-3);
    }
}
