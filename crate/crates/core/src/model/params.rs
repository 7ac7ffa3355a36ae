use super::{FadingProfile, SystemConfig};
use crate::{Error, Result};

/// Per-user constants shared by every closed-form expression.
///
/// The SINR is `γ = X/(θ + ηX)` with `X ~ Gamma(order+1, scale_x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrParams {
    /// `θ = Σ_i α_iℓ + 1/P_u`.
    pub theta: f64,
    /// `η = Σ_{i≠ℓ} β²_iℓ,k / β²_ℓℓ,k`.
    pub eta: f64,
    /// `β̂ = Σ_j β_jℓ,k + 1/(τ_u P_u)`.
    pub beta_hat: f64,
    /// `M − K`; the Gamma shape of `X` is `order + 1`.
    pub order: u32,
    /// Gamma scale of `X`, `β²_ℓℓ,k / β̂`.
    pub scale_x: f64,
    /// `θ / scale_x`, the threshold coefficient of the CDF exponent.
    pub theta_eff: f64,
    /// Rate constant `(1+η)·scale_x/θ`.
    pub a: f64,
    /// Rate constant `η·scale_x/θ`.
    pub b: f64,
    /// Scale of `Y − θ = ηX`, i.e. `η·scale_x`.
    pub kappa_eff: f64,
}

impl SinrParams {
    /// Builds the bundle from its independent quantities.
    pub fn from_raw(order: u32, theta: f64, eta: f64, scale_x: f64, beta_hat: f64) -> Result<Self> {
        let finite_pos = |v: f64| v > 0.0 && v.is_finite();
        if !finite_pos(theta) {
            return Err(Error::Domain(format!("θ must be positive, got {theta}")));
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::Domain(format!("η must be nonnegative, got {eta}")));
        }
        if !finite_pos(scale_x) {
            return Err(Error::Domain(format!("scale of X must be positive, got {scale_x}")));
        }
        if !finite_pos(beta_hat) {
            return Err(Error::Domain(format!("β̂ must be positive, got {beta_hat}")));
        }
        Ok(Self {
            theta,
            eta,
            beta_hat,
            order,
            scale_x,
            theta_eff: theta / scale_x,
            a: (1.0 + eta) * scale_x / theta,
            b: eta * scale_x / theta,
            kappa_eff: eta * scale_x,
        })
    }

    /// Gamma shape `M − K + 1` of `X`.
    pub fn shape(&self) -> u32 {
        self.order + 1
    }

    /// Mean of `X`.
    pub fn mean_x(&self) -> f64 {
        self.shape() as f64 * self.scale_x
    }

    /// Maps a realized `X` to the SINR.
    #[inline]
    pub fn sinr_of(&self, x: f64) -> f64 {
        x / (self.theta + self.eta * x)
    }

    /// Supremum of the SINR, `1/η` (infinite without interference).
    pub fn sinr_ceiling(&self) -> f64 {
        if self.eta > 0.0 {
            1.0 / self.eta
        } else {
            f64::INFINITY
        }
    }
}

/// Derives the parameters of user `user` in cell `cell` from the
/// configuration, the fading profile and the per-source-cell error traces.
pub fn derive_sinr_params(
    cfg: &SystemConfig,
    profile: &FadingProfile,
    cell: usize,
    user: usize,
    alpha: &[f64],
) -> Result<SinrParams> {
    let cfg = cfg.validate()?;
    profile.check_matches(&cfg)?;
    if cell >= cfg.cells || user >= cfg.users {
        return Err(Error::InvalidConfig(format!(
            "user ({cell}, {user}) outside an L={} × K={} system",
            cfg.cells, cfg.users
        )));
    }
    if alpha.len() != cfg.cells {
        return Err(Error::InvalidConfig(format!(
            "expected {} error traces, got {}",
            cfg.cells,
            alpha.len()
        )));
    }
    let desired = profile.desired(cell, user);
    let beta_hat = profile.total_gain(cell, user) + 1.0 / cfg.pilot_energy();
    let theta = alpha.iter().sum::<f64>() + 1.0 / cfg.tx_power;
    let eta = profile.interference_energy(cell, user) / (desired * desired);
    SinrParams::from_raw(cfg.order(), theta, eta, desired * desired / beta_hat, beta_hat)
}
