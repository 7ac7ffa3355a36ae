use crate::model::{FadingProfile, SystemConfig};
use crate::{Error, Result};

/// Large-`M` limit at fixed power: `β²_ℓℓ,k / Σ_{j≠ℓ} β²_jℓ,k`, infinite when
/// nothing interferes.
pub fn asymptotic_sinr(profile: &FadingProfile, cell: usize, user: usize) -> f64 {
    let interference = profile.interference_energy(cell, user);
    if interference == 0.0 {
        f64::INFINITY
    } else {
        profile.desired(cell, user).powi(2) / interference
    }
}

/// Deterministic SINR when `M` and `K` grow with `μ = M/K` fixed:
/// `β²(μ−1) / (β² β̂ Σα/K + Σ_{i≠ℓ} β²_i (μ−1))`.
pub fn fixed_ratio_sinr(
    cfg: &SystemConfig,
    profile: &FadingProfile,
    cell: usize,
    user: usize,
    mu: f64,
    alpha: &[f64],
) -> Result<f64> {
    if !(mu > 1.0) {
        return Err(Error::Domain(format!("antenna/user ratio μ must exceed 1, got {mu}")));
    }
    let desired_sq = profile.desired(cell, user).powi(2);
    let beta_hat = profile.total_gain(cell, user) + 1.0 / cfg.pilot_energy();
    let alpha_sum: f64 = alpha.iter().sum();
    let denom = desired_sq * beta_hat * alpha_sum / cfg.users as f64 + profile.interference_energy(cell, user) * (mu - 1.0);
    Ok(if denom == 0.0 {
        f64::INFINITY
    } else {
        desired_sq * (mu - 1.0) / denom
    })
}

/// Deterministic SINR with power scaled as `P_u = E_u/M`:
/// `τ_u E_u² β² / (τ_u E_u² Σ_{i≠ℓ} β²_i + M)`.
pub fn power_scaled_sinr(
    profile: &FadingProfile,
    cell: usize,
    user: usize,
    energy: f64,
    pilot_length: usize,
    antennas: usize,
) -> Result<f64> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::Domain(format!("E_u must be positive, got {energy}")));
    }
    if antennas == 0 {
        return Err(Error::Domain("M must be at least 1".into()));
    }
    let te2 = pilot_length as f64 * energy * energy;
    Ok(te2 * profile.desired(cell, user).powi(2)
        / (te2 * profile.interference_energy(cell, user) + antennas as f64))
}

/// Spectral efficiency per cell, `((T − τ_u)/T) Σ_k R_k`.
pub fn spectral_efficiency(cfg: &SystemConfig, rates: &[f64]) -> Result<f64> {
    if rates.len() != cfg.users {
        return Err(Error::Domain(format!(
            "expected {} per-user rates, got {}",
            cfg.users,
            rates.len()
        )));
    }
    let t = cfg.coherence_length as f64;
    Ok((t - cfg.pilot_length as f64) / t * rates.iter().sum::<f64>())
}

/// Spectral efficiency of cell `cell` when every user sits at its large-`M`
/// SINR.
pub fn spectral_ceiling(cfg: &SystemConfig, profile: &FadingProfile, cell: usize) -> Result<f64> {
    let rates: Vec<f64> = (0..cfg.users)
        .map(|k| asymptotic_sinr(profile, cell, k).ln_1p() * std::f64::consts::LOG2_E)
        .collect();
    spectral_efficiency(cfg, &rates)
}
