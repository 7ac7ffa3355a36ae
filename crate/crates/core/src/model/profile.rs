use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::SystemConfig;
use crate::{Error, Result};

/// Users closer than this to their serving base station are redrawn.
pub const EXCLUSION_RADIUS_M: f64 = 100.0;

/// Large-scale gains `β[i][ℓ][k]`: user `k` of source cell `i` as seen by
/// base station `ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingProfile {
    cells: usize,
    users: usize,
    beta: Vec<f64>,
}

impl FadingProfile {
    /// Builds a profile from a flat `L × L × K` array in `(source, bs, user)`
    /// order.
    pub fn new(cells: usize, users: usize, beta: Vec<f64>) -> Result<Self> {
        if beta.len() != cells * cells * users {
            return Err(Error::InvalidProfile(format!(
                "expected {} gains for L={cells}, K={users}, got {}",
                cells * cells * users,
                beta.len()
            )));
        }
        if let Some(bad) = beta.iter().find(|b| !(**b >= 0.0) || !b.is_finite()) {
            return Err(Error::InvalidProfile(format!("gain {bad} is not a finite nonnegative value")));
        }
        let profile = Self { cells, users, beta };
        for bs in 0..cells {
            for k in 0..users {
                if profile.gain(bs, bs, k) <= 0.0 {
                    return Err(Error::InvalidProfile(format!(
                        "desired link of user {k} in cell {bs} has zero gain"
                    )));
                }
            }
        }
        Ok(profile)
    }

    pub fn from_fn(cells: usize, users: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut beta = Vec::with_capacity(cells * cells * users);
        for src in 0..cells {
            for bs in 0..cells {
                for k in 0..users {
                    beta.push(f(src, bs, k));
                }
            }
        }
        Self::new(cells, users, beta)
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn users(&self) -> usize {
        self.users
    }

    #[inline]
    pub fn gain(&self, source: usize, bs: usize, user: usize) -> f64 {
        self.beta[(source * self.cells + bs) * self.users + user]
    }

    pub fn desired(&self, bs: usize, user: usize) -> f64 {
        self.gain(bs, bs, user)
    }

    /// `Σ_j β[j][bs][user]` over every source cell.
    pub fn total_gain(&self, bs: usize, user: usize) -> f64 {
        (0..self.cells).map(|j| self.gain(j, bs, user)).sum()
    }

    /// `Σ_{j≠bs} β[j][bs][user]²`.
    pub fn interference_energy(&self, bs: usize, user: usize) -> f64 {
        (0..self.cells)
            .filter(|j| *j != bs)
            .map(|j| self.gain(j, bs, user).powi(2))
            .sum()
    }

    pub fn check_matches(&self, cfg: &SystemConfig) -> Result<()> {
        if self.cells != cfg.cells || self.users != cfg.users {
            return Err(Error::InvalidProfile(format!(
                "profile is {}×{}×{} but config has L={}, K={}",
                self.cells, self.cells, self.users, cfg.cells, cfg.users
            )));
        }
        Ok(())
    }
}

/// Symmetric profile: desired links 1, every interfering link `cross_gain`.
pub fn fixed_cross_gain_profile(cfg: &SystemConfig, cross_gain: f64) -> Result<FadingProfile> {
    if !(cross_gain >= 0.0) || !cross_gain.is_finite() {
        return Err(Error::InvalidProfile(format!(
            "cross gain must be a finite nonnegative value, got {cross_gain}"
        )));
    }
    FadingProfile::from_fn(cfg.cells, cfg.users, |src, bs, _| {
        if src == bs {
            1.0
        } else {
            cross_gain
        }
    })
}

/// Drawn geometry behind a hexagonal profile.
#[derive(Debug, Clone, PartialEq)]
pub struct HexagonalLayout {
    pub base_stations: Vec<[f64; 2]>,
    /// `positions[cell][user]`.
    pub users: Vec<Vec<[f64; 2]>>,
    /// Shadowing in dB, same `(source, bs, user)` order as the profile.
    pub shadowing_db: Vec<f64>,
    pub profile: FadingProfile,
}

fn inside_hexagon(x: f64, y: f64, radius: f64) -> bool {
    // flat-top hexagon, centre-to-vertex `radius`
    let s3 = 3f64.sqrt();
    y.abs() <= 0.5 * s3 * radius && s3 * x.abs() + y.abs() <= s3 * radius
}

/// Seven-cell hexagonal layout (centre cell plus first tier at distance
/// `√3·radius`); the first `L ≤ 7` cells are used. Users are uniform over
/// their hexagon outside [`EXCLUSION_RADIUS_M`]; gains are
/// `β = z / r^pathloss_exp` with independent log-normal `z`.
pub fn hexagonal_layout(
    cfg: &SystemConfig,
    radius_m: f64,
    pathloss_exp: f64,
    shadow_std_db: f64,
    seed: u64,
) -> Result<HexagonalLayout> {
    if cfg.cells > 7 {
        return Err(Error::InvalidConfig(format!(
            "hexagonal layout supports at most 7 cells, got {}",
            cfg.cells
        )));
    }
    if !(radius_m > EXCLUSION_RADIUS_M) || !radius_m.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "cell radius must exceed the {EXCLUSION_RADIUS_M} m exclusion zone, got {radius_m}"
        )));
    }
    if !(pathloss_exp > 0.0) || !pathloss_exp.is_finite() {
        return Err(Error::InvalidConfig(format!("path-loss exponent must be positive, got {pathloss_exp}")));
    }
    if !(shadow_std_db >= 0.0) || !shadow_std_db.is_finite() {
        return Err(Error::InvalidConfig(format!("shadowing std must be nonnegative, got {shadow_std_db}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 3f64.sqrt() * radius_m;
    let mut base_stations = vec![[0.0, 0.0]];
    for j in 0..6 {
        let angle = std::f64::consts::PI / 6.0 + j as f64 * std::f64::consts::PI / 3.0;
        base_stations.push([d * angle.cos(), d * angle.sin()]);
    }
    base_stations.truncate(cfg.cells);

    let users: Vec<Vec<[f64; 2]>> = base_stations
        .iter()
        .map(|c| {
            (0..cfg.users)
                .map(|_| loop {
                    let x = rng.random_range(-radius_m..radius_m);
                    let y = rng.random_range(-radius_m..radius_m);
                    if inside_hexagon(x, y, radius_m) && x.hypot(y) >= EXCLUSION_RADIUS_M {
                        break [c[0] + x, c[1] + y];
                    }
                })
                .collect()
        })
        .collect();

    let mut shadowing_db = Vec::with_capacity(cfg.cells * cfg.cells * cfg.users);
    let mut beta = Vec::with_capacity(shadowing_db.capacity());
    for cell_users in &users {
        for bs in &base_stations {
            for u in cell_users {
                let z: f64 = StandardNormal.sample(&mut rng);
                let z_db = shadow_std_db * z;
                let r = (u[0] - bs[0]).hypot(u[1] - bs[1]);
                shadowing_db.push(z_db);
                beta.push(10f64.powf(z_db / 10.0) / r.powf(pathloss_exp));
            }
        }
    }
    let profile = FadingProfile::new(cfg.cells, cfg.users, beta)?;
    Ok(HexagonalLayout {
        base_stations,
        users,
        shadowing_db,
        profile,
    })
}

/// Profile of [`hexagonal_layout`]; bit-identical for a fixed seed.
pub fn hexagonal_profile(
    cfg: &SystemConfig,
    radius_m: f64,
    pathloss_exp: f64,
    shadow_std_db: f64,
    seed: u64,
) -> Result<FadingProfile> {
    hexagonal_layout(cfg, radius_m, pathloss_exp, shadow_std_db, seed).map(|l| l.profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SystemConfig {
        SystemConfig::reference(100)
    }

    #[test]
    fn fixed_profile_entries() {
        let p = fixed_cross_gain_profile(&cfg(), 0.05).unwrap();
        for src in 0..7 {
            for bs in 0..7 {
                for k in 0..10 {
                    let expected = if src == bs { 1.0 } else { 0.05 };
                    assert_eq!(p.gain(src, bs, k), expected);
                }
            }
        }
        let ones = fixed_cross_gain_profile(&cfg(), 1.0).unwrap();
        assert!((0..7).all(|i| ones.gain(i, 3, 2) == 1.0));
        let clean = fixed_cross_gain_profile(&cfg(), 0.0).unwrap();
        assert_eq!(clean.interference_energy(0, 0), 0.0);
        assert!(fixed_cross_gain_profile(&cfg(), -0.1).is_err());
    }

    #[test]
    fn rejects_malformed_profiles() {
        assert!(FadingProfile::new(2, 1, vec![1.0, 0.1, 0.1]).is_err());
        assert!(FadingProfile::new(2, 1, vec![1.0, 0.1, -0.1, 1.0]).is_err());
        assert!(FadingProfile::new(2, 1, vec![0.0, 0.1, 0.1, 1.0]).is_err());
        assert!(FadingProfile::new(2, 1, vec![1.0, 0.1, 0.1, 1.0]).is_ok());
    }

    #[test]
    fn hexagonal_is_reproducible() {
        let a = hexagonal_profile(&cfg(), 1000.0, 4.0, 8.0, 17).unwrap();
        let b = hexagonal_profile(&cfg(), 1000.0, 4.0, 8.0, 17).unwrap();
        assert_eq!(a, b);
        let c = hexagonal_profile(&cfg(), 1000.0, 4.0, 8.0, 18).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn path_loss_arithmetic() {
        // z = 1 (no shadowing), r = 1000, γ = 4 → β = 1e-12
        let layout = hexagonal_layout(&cfg(), 1000.0, 4.0, 0.0, 3).unwrap();
        let u = layout.users[1][4];
        let bs = layout.base_stations[0];
        let r = (u[0] - bs[0]).hypot(u[1] - bs[1]);
        let beta = layout.profile.gain(1, 0, 4);
        assert!((beta * r.powi(4) - 1.0).abs() < 1e-12);
        assert!((1.0 / 1000f64.powf(4.0) - 1e-12).abs() < 1e-27);
    }

    #[test]
    fn users_inside_their_cell() {
        let layout = hexagonal_layout(&cfg(), 1000.0, 3.8, 8.0, 5).unwrap();
        for (c, users) in layout.users.iter().enumerate() {
            let bs = layout.base_stations[c];
            for u in users {
                let (x, y) = (u[0] - bs[0], u[1] - bs[1]);
                assert!(inside_hexagon(x, y, 1000.0));
                assert!(x.hypot(y) >= EXCLUSION_RADIUS_M);
            }
        }
        // first tier sits at √3·R
        for bs in &layout.base_stations[1..] {
            assert!((bs[0].hypot(bs[1]) - 3f64.sqrt() * 1000.0).abs() < 1e-9);
        }
    }

    #[test]
    fn shadowing_spread_is_eight_db() {
        // many seeds pooled: log10(z) should have std 0.8
        let mut samples = Vec::new();
        for seed in 0..40 {
            let layout = hexagonal_layout(&cfg(), 1000.0, 4.0, 8.0, seed).unwrap();
            samples.extend(layout.shadowing_db.iter().map(|db| db / 10.0));
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // 19600 samples: std error of the std is ≈ 0.8/√(2n) ≈ 0.004
        assert!((var.sqrt() - 0.8).abs() < 0.02, "std {}", var.sqrt());
        assert!(mean.abs() < 0.03);
    }

    #[test]
    fn hexagonal_rejects_bad_inputs() {
        let big = SystemConfig { cells: 8, ..cfg() };
        assert!(hexagonal_profile(&big, 1000.0, 4.0, 8.0, 0).is_err());
        assert!(hexagonal_profile(&cfg(), 50.0, 4.0, 8.0, 0).is_err());
        assert!(hexagonal_profile(&cfg(), 1000.0, 0.0, 8.0, 0).is_err());
    }
}
