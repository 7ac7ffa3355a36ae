//! `key = value` scenario files.

use std::fmt;
use std::str::FromStr;

use super::{fixed_cross_gain_profile, hexagonal_profile, FadingProfile, SystemConfig};
use crate::{Error, Result};

/// How the large-scale fading profile is produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Desired gain 1, every interfering link `cross_gain`.
    Fixed { cross_gain: f64 },
    /// Seven-cell hexagonal geometry with path loss and log-normal shadowing.
    Hexagonal {
        radius_m: f64,
        pathloss_exp: f64,
        shadow_std_db: f64,
        seed: u64,
    },
}

/// A parsed scenario file: system parameters plus the profile recipe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub system: SystemConfig,
    pub scenario: Scenario,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            system: SystemConfig::reference(100),
            scenario: Scenario::Fixed { cross_gain: 0.05 },
        }
    }
}

impl ScenarioConfig {
    /// Validates the system and materializes the fading profile.
    pub fn build_profile(&self) -> Result<FadingProfile> {
        let cfg = self.system.validate()?;
        match self.scenario {
            Scenario::Fixed { cross_gain } => fixed_cross_gain_profile(&cfg, cross_gain),
            Scenario::Hexagonal {
                radius_m,
                pathloss_exp,
                shadow_std_db,
                seed,
            } => hexagonal_profile(&cfg, radius_m, pathloss_exp, shadow_std_db, seed),
        }
    }

    /// Parses a scenario file. Unset keys keep their reference values; `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::default();
        let mut snr_db = None;
        let mut kind = None;
        let mut cross_gain = 0.05;
        let (mut radius_m, mut pathloss_exp, mut shadow_std_db, mut seed) = (1000.0, 3.8, 8.0, 0u64);

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected `key = value`, got `{body}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let sys = &mut out.system;
            match key {
                "L" => sys.cells = num(line, key, value)?,
                "K" => sys.users = num(line, key, value)?,
                "M" => sys.antennas = num(line, key, value)?,
                "tau_u" => sys.pilot_length = num(line, key, value)?,
                "T" => sys.coherence_length = num(line, key, value)?,
                "qam_order" => sys.qam_order = num(line, key, value)?,
                "snr_db" => snr_db = Some(num::<f64>(line, key, value)?),
                "scenario" => {
                    kind = Some(match value {
                        "fixed" => false,
                        "hex" => true,
                        other => {
                            return Err(Error::Parse {
                                line,
                                msg: format!("scenario must be `fixed` or `hex`, got `{other}`"),
                            })
                        }
                    })
                }
                "cross_gain" => cross_gain = num(line, key, value)?,
                "radius_m" => radius_m = num(line, key, value)?,
                "pathloss_exp" => pathloss_exp = num(line, key, value)?,
                "shadow_std_db" => shadow_std_db = num(line, key, value)?,
                "seed" => seed = num(line, key, value)?,
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        if let Some(db) = snr_db {
            out.system = out.system.with_snr_db(db);
        }
        out.scenario = if kind == Some(true) {
            Scenario::Hexagonal {
                radius_m,
                pathloss_exp,
                shadow_std_db,
                seed,
            }
        } else {
            Scenario::Fixed { cross_gain }
        };
        out.system.validate()?;
        Ok(out)
    }
}

fn num<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| Error::Parse {
        line,
        msg: format!("bad value for `{key}`: {e}"),
    })
}

impl FromStr for ScenarioConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.system;
        writeln!(f, "L = {}", s.cells)?;
        writeln!(f, "K = {}", s.users)?;
        writeln!(f, "M = {}", s.antennas)?;
        writeln!(f, "tau_u = {}", s.pilot_length)?;
        writeln!(f, "T = {}", s.coherence_length)?;
        writeln!(f, "snr_db = {}", s.snr_db())?;
        writeln!(f, "qam_order = {}", s.qam_order)?;
        match self.scenario {
            Scenario::Fixed { cross_gain } => {
                writeln!(f, "scenario = fixed")?;
                writeln!(f, "cross_gain = {cross_gain}")
            }
            Scenario::Hexagonal {
                radius_m,
                pathloss_exp,
                shadow_std_db,
                seed,
            } => {
                writeln!(f, "scenario = hex")?;
                writeln!(f, "radius_m = {radius_m}")?;
                writeln!(f, "pathloss_exp = {pathloss_exp}")?;
                writeln!(f, "shadow_std_db = {shadow_std_db}")?;
                writeln!(f, "seed = {seed}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_reference() {
        let cfg = ScenarioConfig::parse("# nothing\n\n").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
    }

    #[test]
    fn parses_all_keys() {
        let text = "L = 3\nK=4 # users\nM = 32\ntau_u = 4\nT = 50\nsnr_db = 20\nqam_order = 16\n\
                    scenario = hex\nradius_m = 500\npathloss_exp = 4\nshadow_std_db = 6\nseed = 9\n";
        let cfg = ScenarioConfig::parse(text).unwrap();
        assert_eq!(cfg.system.cells, 3);
        assert_eq!(cfg.system.antennas, 32);
        assert!((cfg.system.tx_power - 100.0).abs() < 1e-9);
        assert_eq!(
            cfg.scenario,
            Scenario::Hexagonal {
                radius_m: 500.0,
                pathloss_exp: 4.0,
                shadow_std_db: 6.0,
                seed: 9
            }
        );
        assert_eq!(cfg.build_profile().unwrap().cells(), 3);
    }

    #[test]
    fn round_trips_through_text() {
        let cfg = ScenarioConfig::parse("M = 64\ncross_gain = 0.2\nsnr_db = 5").unwrap();
        let again: ScenarioConfig = cfg.to_string().parse().unwrap();
        assert_eq!(cfg.scenario, again.scenario);
        assert_eq!(cfg.system.antennas, again.system.antennas);
        assert!((cfg.system.tx_power - again.system.tx_power).abs() < 1e-12);
    }

    #[test]
    fn reports_line_numbers() {
        match ScenarioConfig::parse("L = 7\n\nM = many\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(ScenarioConfig::parse("bogus = 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ScenarioConfig::parse("just text"), Err(Error::Parse { .. })));
        assert!(matches!(
            ScenarioConfig::parse("M = 5"),
            Err(Error::InvalidConfig(_))
        ));
    }
}
