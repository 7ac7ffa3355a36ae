use std::f64::consts::LOG2_E;

use crate::model::SinrParams;
use crate::specfun::{exp_integral_ei, gamma_expectation, ln_factorial, scaled_expint_en, QuadratureSpec};
use crate::{Error, Result};

/// Largest `M − K` for which the alternating-sum form is trusted.
pub const LITERAL_RATE_MAX_ORDER: u32 = 20;

/// `E[ln(1 + c·T)]` for `T ~ Gamma(n+1, 1)`, as `Σ_{m=0}^{n} e^y E_{m+1}(y)`
/// with `y = 1/c`. Every term is positive, so there is no cancellation.
fn log_moment(c: f64, order: u32) -> Result<f64> {
    if c == 0.0 {
        return Ok(0.0);
    }
    let y = 1.0 / c;
    let mut sum = 0.0;
    for m in 0..=order {
        sum += scaled_expint_en(m + 1, y)?;
    }
    Ok(sum)
}

/// Exact achievable rate in bits/s/Hz, `E[log₂(1+γ)]`.
pub fn rate_closed(p: &SinrParams) -> Result<f64> {
    Ok(LOG2_E * (log_moment(p.a, p.order)? - log_moment(p.b, p.order)?))
}

/// One rate constant's share of the alternating sum:
/// `Σ_μ [(−1)^{j−1} c^{−j} e^{1/c} Ei(−1/c) + Σ_{k=1}^{j} (k−1)! (−1/c)^{j−k}] / j!`
/// with `j = n − μ`.
fn literal_term(c: f64, order: u32) -> Result<f64> {
    if c == 0.0 {
        return Ok(0.0);
    }
    let y = 1.0 / c;
    let e_ei = y.exp() * exp_integral_ei(-y)?;
    let mut total = 0.0;
    for j in 0..=order as i32 {
        let sign = if (j - 1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let mut inner = sign * y.powi(j) * e_ei;
        for k in 1..=j {
            inner += (ln_factorial((k - 1) as u64)).exp() * (-y).powi(j - k);
        }
        total += inner / ln_factorial(j as u64).exp();
    }
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::Domain(format!(
            "alternating rate form overflows at c = {c}, M − K = {order}"
        )))
    }
}

/// The alternating Ei/factorial form of the rate as usually printed.
///
/// It loses digits to cancellation as `M − K` grows, so above
/// [`LITERAL_RATE_MAX_ORDER`] it hands over to [`rate_quadrature`].
pub fn rate_closed_literal(p: &SinrParams) -> Result<f64> {
    if p.order > LITERAL_RATE_MAX_ORDER {
        log::warn!(
            "M − K = {} exceeds the literal rate form's stability cap {}; using quadrature",
            p.order,
            LITERAL_RATE_MAX_ORDER
        );
        return rate_quadrature(p);
    }
    Ok(LOG2_E * (literal_term(p.a, p.order)? - literal_term(p.b, p.order)?))
}

/// The rate by direct quadrature of `log₂((1 + a x̂)/(1 + b x̂))` against the
/// Gamma(M−K+1) density.
pub fn rate_quadrature(p: &SinrParams) -> Result<f64> {
    let (a, b) = (p.a, p.b);
    let spec = QuadratureSpec::new(1e-300, 1e-13, 4000)?;
    let nats = gamma_expectation(|x| ((a - b) * x / (1.0 + b * x)).ln_1p(), p.shape() as f64, &spec)?;
    Ok(LOG2_E * nats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_ab(order: u32, a: f64, b: f64) -> SinrParams {
        // θ = 1 and scale_x = a − b reproduce the requested constants.
        let mut p = SinrParams::from_raw(order, 1.0, b / (a - b), a - b, 1.0).unwrap();
        p.a = a;
        p.b = b;
        p
    }

    #[test]
    fn unit_exponential_reference() {
        let p = with_ab(0, 1.0, 0.0);
        // ∫ ln(1+x) e^{−x} dx = 0.5963473623231941 nats
        let want = 0.5963473623231941 * LOG2_E;
        assert!((rate_closed(&p).unwrap() - want).abs() < 1e-14);
        assert!((rate_closed_literal(&p).unwrap() - want).abs() < 1e-14);
        assert!((rate_quadrature(&p).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.8603473822708859).abs() < 1e-15);
    }

    #[test]
    fn equal_constants_give_zero_rate() {
        let mut p = with_ab(4, 0.7, 0.3);
        p.b = p.a;
        assert_eq!(rate_closed(&p).unwrap(), 0.0);
        assert!(rate_closed_literal(&p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn literal_and_stable_forms_agree_for_small_orders() {
        for order in [0, 1, 3, 6] {
            for (a, b) in [(0.8, 0.0), (2.0, 0.1), (0.3, 0.05)] {
                let p = with_ab(order, a, b);
                let stable = rate_closed(&p).unwrap();
                let literal = rate_closed_literal(&p).unwrap();
                assert!((stable - literal).abs() < 1e-9 * stable, "n={order} a={a}: {stable} vs {literal}");
            }
        }
    }

    #[test]
    fn literal_form_routes_to_quadrature_above_cap() {
        let p = with_ab(40, 0.5, 0.01);
        let lit = rate_closed_literal(&p).unwrap();
        assert!((lit - rate_quadrature(&p).unwrap()).abs() == 0.0);
    }
}
