//! System configuration, large-scale fading, and the per-user parameter
//! bundle consumed by every closed form.

mod params;
mod profile;
mod scenario;

pub use params::{derive_sinr_params, SinrParams};
pub use profile::{
    fixed_cross_gain_profile, hexagonal_layout, hexagonal_profile, FadingProfile, HexagonalLayout,
    EXCLUSION_RADIUS_M,
};
pub use scenario::{Scenario, ScenarioConfig};

use crate::{Error, Result};

/// QAM orders accepted by the SER machinery.
pub const SUPPORTED_QAM: [u32; 4] = [4, 16, 64, 256];

/// Cell, user, antenna and coherence parameters of the multicell uplink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Number of cells `L` sharing the time-frequency resource.
    pub cells: usize,
    /// Users per cell `K`.
    pub users: usize,
    /// Base-station antennas `M`.
    pub antennas: usize,
    /// Pilot symbols per coherence interval `τ_u`.
    pub pilot_length: usize,
    /// Coherence interval `T` in symbols.
    pub coherence_length: usize,
    /// Per-user transmit power, linear; noise is unit so this is the SNR.
    pub tx_power: f64,
    /// Square QAM constellation size.
    pub qam_order: u32,
}

impl SystemConfig {
    /// The 7-cell setup used throughout the numerical section:
    /// `K = τ_u = 10`, `T = 196`, SNR 10 dB, 4-QAM.
    pub fn reference(antennas: usize) -> Self {
        Self {
            cells: 7,
            users: 10,
            antennas,
            pilot_length: 10,
            coherence_length: 196,
            tx_power: 10.0,
            qam_order: 4,
        }
    }

    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.tx_power = crate::db_to_linear(snr_db);
        self
    }

    pub fn snr_db(&self) -> f64 {
        crate::linear_to_db(self.tx_power)
    }

    /// `M − K`, the Gamma order of the Gram-inverse diagonal.
    pub fn order(&self) -> u32 {
        (self.antennas - self.users) as u32
    }

    /// Pilot energy `τ_u P_u`.
    pub fn pilot_energy(&self) -> f64 {
        self.pilot_length as f64 * self.tx_power
    }

    pub fn validate(self) -> Result<Self> {
        validate_config(self)
    }
}

/// Checks every configuration invariant and returns the config unchanged.
pub fn validate_config(cfg: SystemConfig) -> Result<SystemConfig> {
    let fail = |msg: String| Err(Error::InvalidConfig(msg));
    if cfg.cells == 0 {
        return fail("cell count L must be at least 1".into());
    }
    if cfg.users == 0 {
        return fail("users per cell K must be at least 1".into());
    }
    if cfg.antennas < cfg.users {
        return fail(format!(
            "M < K: {} antennas cannot separate {} users",
            cfg.antennas, cfg.users
        ));
    }
    if cfg.pilot_length < cfg.users {
        return fail(format!(
            "τ_u < K: {} pilot symbols cannot be orthogonal for {} users",
            cfg.pilot_length, cfg.users
        ));
    }
    if cfg.coherence_length <= cfg.pilot_length {
        return fail(format!(
            "T ≤ τ_u: coherence length {} leaves no data symbols after {} pilots",
            cfg.coherence_length, cfg.pilot_length
        ));
    }
    if !(cfg.tx_power > 0.0) || !cfg.tx_power.is_finite() {
        return fail(format!("P_u must be positive and finite, got {}", cfg.tx_power));
    }
    if !SUPPORTED_QAM.contains(&cfg.qam_order) {
        return Err(Error::UnsupportedQam(cfg.qam_order));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_setup_is_valid() {
        let cfg = SystemConfig::reference(100);
        assert_eq!(validate_config(cfg), Ok(cfg));
        assert_eq!(cfg.coherence_length, 196);
    }

    #[test]
    fn rejects_too_few_antennas() {
        let cfg = SystemConfig {
            antennas: 9,
            ..SystemConfig::reference(100)
        };
        let err = validate_config(cfg).unwrap_err();
        assert!(err.to_string().contains("M < K"), "{err}");
    }

    #[test]
    fn rejects_short_pilots() {
        let cfg = SystemConfig {
            pilot_length: 9,
            ..SystemConfig::reference(100)
        };
        let err = validate_config(cfg).unwrap_err();
        assert!(err.to_string().contains("τ_u < K"), "{err}");
    }

    #[test]
    fn rejects_other_violations() {
        let base = SystemConfig::reference(100);
        assert!(validate_config(SystemConfig { coherence_length: 10, ..base }).is_err());
        assert!(validate_config(SystemConfig { tx_power: 0.0, ..base }).is_err());
        assert!(validate_config(SystemConfig { cells: 0, ..base }).is_err());
        assert_eq!(
            validate_config(SystemConfig { qam_order: 8, ..base }),
            Err(Error::UnsupportedQam(8))
        );
    }

    #[test]
    fn snr_round_trip() {
        let cfg = SystemConfig::reference(50).with_snr_db(10.0);
        assert!((cfg.tx_power - 10.0).abs() < 1e-12);
        assert!((cfg.snr_db() - 10.0).abs() < 1e-12);
    }
}
