//! Fast fading, the uplink pilot phase and MMSE channel estimation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::model::{FadingProfile, SystemConfig};
use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Draws one circularly-symmetric complex Gaussian with unit variance.
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of i.i.d. `CN(0, 1)` entries, filled column-major.
pub fn complex_normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// All channels seen by one base station in one coherence interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `h[i]`: small-scale fading from the users of cell `i`.
    pub h: Vec<CMatrix>,
    /// `g[i] = h[i] · diag(β_iℓ,k)^{1/2}`.
    pub g: Vec<CMatrix>,
    pub observing_cell: usize,
}

impl ChannelRealization {
    pub fn desired(&self) -> &CMatrix {
        &self.g[self.observing_cell]
    }
}

fn check_cell(cfg: &SystemConfig, profile: &FadingProfile, cell: usize) -> Result<()> {
    profile.check_matches(cfg)?;
    if cell >= cfg.cells {
        return Err(Error::InvalidConfig(format!(
            "cell {cell} outside an L={} system",
            cfg.cells
        )));
    }
    Ok(())
}

/// Draws `H_iℓ` for every source cell and composes `G_iℓ`.
pub fn draw_channels<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    profile: &FadingProfile,
    cell: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    check_cell(cfg, profile, cell)?;
    let (m, k) = (cfg.antennas, cfg.users);
    let h: Vec<CMatrix> = (0..cfg.cells).map(|_| complex_normal_matrix(m, k, rng)).collect();
    let g = h
        .iter()
        .enumerate()
        .map(|(src, hi)| {
            let mut gi = hi.clone();
            for (user, mut col) in gi.column_iter_mut().enumerate() {
                col *= Complex64::from(profile.gain(src, cell, user).sqrt());
            }
            gi
        })
        .collect();
    Ok(ChannelRealization {
        h,
        g,
        observing_cell: cell,
    })
}

/// Pilot matrix after projection onto the (shared, orthonormal) pilots:
/// `√(τ_u P_u) Σ_i G_iℓ + W`.
pub fn pilot_observation<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    channels: &ChannelRealization,
    rng: &mut R,
) -> CMatrix {
    let amp = Complex64::from(cfg.pilot_energy().sqrt());
    let mut y = complex_normal_matrix(cfg.antennas, cfg.users, rng);
    for gi in &channels.g {
        y.zip_apply(gi, |acc, v| *acc += amp * v);
    }
    y
}

/// Output of the MMSE estimator at base station `ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    /// `Ĝ_ℓℓ`.
    pub g_hat: CMatrix,
    /// `ξ_ℓℓ = G_ℓℓ − Ĝ_ℓℓ`.
    pub xi: CMatrix,
    /// `α_iℓ` for every source cell.
    pub alpha: Vec<f64>,
    /// Normalized estimation error of `Ĝ_ℓℓ` in dB.
    pub norm_err_db: f64,
}

/// Per-column MMSE weight `β_iℓ,k / β̂_ℓk` applied to `Ỹ/√(τ_u P_u)`.
fn mmse_weight(cfg: &SystemConfig, profile: &FadingProfile, cell: usize, source: usize, user: usize) -> f64 {
    profile.gain(source, cell, user) / (profile.total_gain(cell, user) + 1.0 / cfg.pilot_energy())
}

/// MMSE estimate of `G_iℓ` from the projected pilot observation.
pub fn estimate_source(
    cfg: &SystemConfig,
    profile: &FadingProfile,
    cell: usize,
    source: usize,
    y: &CMatrix,
) -> CMatrix {
    let inv_amp = 1.0 / cfg.pilot_energy().sqrt();
    let mut est = y.clone();
    for (user, mut col) in est.column_iter_mut().enumerate() {
        col *= Complex64::from(inv_amp * mmse_weight(cfg, profile, cell, source, user));
    }
    est
}

/// Estimates `G_ℓℓ` and reports the error against the true realization.
pub fn mmse_estimate(
    cfg: &SystemConfig,
    profile: &FadingProfile,
    channels: &ChannelRealization,
    y: &CMatrix,
) -> Result<EstimationResult> {
    let cell = channels.observing_cell;
    check_cell(cfg, profile, cell)?;
    let g_hat = estimate_source(cfg, profile, cell, cell, y);
    let g = channels.desired();
    let xi = g - &g_hat;
    let norm_err_db = normalized_error_db(g, &g_hat)?;
    Ok(EstimationResult {
        g_hat,
        xi,
        alpha: estimation_error_traces(cfg, profile, cell)?,
        norm_err_db,
    })
}

/// Closed-form error traces
/// `α_iℓ = Σ_k τ_u P_u β_iℓ,k Σ_{j≠i} β_jℓ,k / (τ_u P_u Σ_j β_jℓ,k + 1)`.
///
/// This drops the noise-induced share `β_iℓ,k / (τ_u P_u β̂_ℓk)` of the
/// per-entry error variance; see [`error_variance`] for the full value.
pub fn estimation_error_traces(cfg: &SystemConfig, profile: &FadingProfile, cell: usize) -> Result<Vec<f64>> {
    check_cell(cfg, profile, cell)?;
    let tp = cfg.pilot_energy();
    Ok((0..cfg.cells)
        .map(|i| {
            (0..cfg.users)
                .map(|k| {
                    let bi = profile.gain(i, cell, k);
                    let total = profile.total_gain(cell, k);
                    tp * bi * (total - bi) / (tp * total + 1.0)
                })
                .sum()
        })
        .collect())
}

/// Exact per-entry variance of the estimation error of `G_iℓ` column `k`,
/// `β_iℓ,k − β²_iℓ,k / β̂_ℓk`.
pub fn error_variance(cfg: &SystemConfig, profile: &FadingProfile, cell: usize, source: usize, user: usize) -> f64 {
    let b = profile.gain(source, cell, user);
    b - b * mmse_weight(cfg, profile, cell, source, user)
}

/// `10·log10(‖G − Ĝ‖²_F / ‖G‖²_F)`; a perfect estimate yields `-∞`.
pub fn normalized_error_db(g: &CMatrix, g_hat: &CMatrix) -> Result<f64> {
    if g.shape() != g_hat.shape() {
        return Err(Error::Domain(format!(
            "shape mismatch {:?} vs {:?}",
            g.shape(),
            g_hat.shape()
        )));
    }
    let denom = g.norm_squared();
    if denom == 0.0 {
        return Err(Error::Domain("normalized error of an all-zero channel".into()));
    }
    let num = (g - g_hat).norm_squared();
    Ok(if num == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (num / denom).log10()
    })
}
