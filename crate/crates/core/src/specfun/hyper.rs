use super::quad::{gamma_expectation, QuadratureSpec};
use crate::{Error, Result};

fn quad_spec() -> QuadratureSpec {
    QuadratureSpec::new(1e-300, 2e-14, 4000).expect("static spec is valid")
}

/// Tricomi confluent hypergeometric function `U(a, b, x)` for `a > 0`,
/// `x > 0`, from its Laplace representation
/// `U = Γ(a)^{-1} ∫₀^∞ e^{−xt} t^{a−1} (1+t)^{b−a−1} dt`.
pub fn tricomi_u(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(x > 0.0) || !b.is_finite() || !x.is_finite() {
        return Err(Error::Domain(format!(
            "U(a, b, x) needs a > 0 and x > 0, got a={a}, b={b}, x={x}"
        )));
    }
    // substitute s = x t: U = x^{-a} E[(1 + S/x)^{b−a−1}], S ~ Gamma(a)
    let power = b - a - 1.0;
    let mean = gamma_expectation(|s| (power * (s / x).ln_1p()).exp(), a, &quad_spec())?;
    Ok(mean * (-a * x.ln()).exp())
}

/// Generalized hypergeometric `₂F₀(p1, p2; −; z)` with integer parameters.
///
/// Terminates when either parameter is a nonpositive integer. For `z < 0`
/// the nonterminating value is the Borel sum fixed by the Tricomi identity
/// `₂F₀(a, b; −; z) = (−z)^{−a} U(a, a−b+1, −1/z)`, evaluated in the
/// equivalent form `E[(1 − zT)^{−p2}]`, `T ~ Gamma(p1)`, which avoids the
/// overflow of `(−z)^{−a}`. A nonterminating series at `z > 0` has no
/// canonical value and is rejected.
pub fn hyp_2f0(p1: i64, p2: i64, z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::Domain("₂F₀ argument is NaN".into()));
    }
    if p1 == 0 || p2 == 0 || z == 0.0 {
        return Ok(1.0);
    }
    if p1 < 0 || p2 < 0 {
        let terms = if p1 < 0 && p2 < 0 {
            (-p1).min(-p2)
        } else if p1 < 0 {
            -p1
        } else {
            -p2
        };
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..terms {
            term *= (p1 + k) as f64 * (p2 + k) as f64 * z / (k + 1) as f64;
            sum += term;
        }
        return Ok(sum);
    }
    if z > 0.0 {
        return Err(Error::Domain(format!(
            "₂F₀({p1}, {p2}; −; {z}) diverges for z > 0 with nonterminating parameters"
        )));
    }
    let w = -z;
    let p2 = p2 as f64;
    gamma_expectation(|t| (-p2 * (w * t).ln_1p()).exp(), p1 as f64, &quad_spec())
}
