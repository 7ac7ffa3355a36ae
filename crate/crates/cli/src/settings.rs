//! Resolved run settings: scenario file, seed, trial budget and the
//! desk-scale caps.

use std::path::Path;

use anyhow::{bail, Context};
use mimo_zf::analytic::{rate_closed, ser_exact, spectral_efficiency};
use mimo_zf::model::{FadingProfile, ScenarioConfig};
use mimo_zf::montecarlo::{run_ser_trials, run_sinr_trials, Execution, TrialPlan, Users};
use mimo_zf::SystemConfig;
use serde::Serialize;

pub const MAX_ANTENNAS: usize = 4096;
pub const MAX_TRIALS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub scenario: ScenarioConfig,
    pub seed: u64,
    pub trials: usize,
    pub execution: Execution,
}

impl Settings {
    pub fn new(scenario: ScenarioConfig, seed: u64, trials: usize) -> anyhow::Result<Self> {
        if trials == 0 || trials > MAX_TRIALS {
            bail!("trials must be in 1..={MAX_TRIALS}, got {trials}");
        }
        check_antennas(scenario.system.antennas)?;
        Ok(Self {
            scenario,
            seed,
            trials,
            execution: Execution::Parallel,
        })
    }

    pub fn load(config: Option<&Path>, seed: u64, trials: usize) -> anyhow::Result<Self> {
        let scenario = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ScenarioConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ScenarioConfig::default(),
        };
        Self::new(scenario, seed, trials)
    }

    pub fn system(&self) -> SystemConfig {
        self.scenario.system
    }

    /// A plan over `cfg`/`profile` with this run's trial budget and schedule.
    pub fn plan(&self, cfg: SystemConfig, profile: FadingProfile, seed: u64) -> anyhow::Result<TrialPlan> {
        check_antennas(cfg.antennas)?;
        let mut plan = TrialPlan::new(cfg, profile, seed, self.trials);
        plan.execution = self.execution;
        Ok(plan)
    }
}

pub fn check_antennas(m: usize) -> anyhow::Result<()> {
    if m > MAX_ANTENNAS {
        bail!("M = {m} exceeds the desk-scale cap of {MAX_ANTENNAS} antennas");
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct MontecarloSummary {
    pub trials: usize,
    pub redraws: u64,
    pub mean_sinr: f64,
    pub se_sinr: f64,
    pub median_sinr: f64,
    pub mean_rate: f64,
    pub se_rate: f64,
    pub analytic_rate: f64,
    pub gamma_th_db: f64,
    pub outage: f64,
    pub analytic_outage: f64,
    pub spectral_efficiency: Option<f64>,
    pub analytic_spectral_efficiency: f64,
    pub norm_err_db: f64,
    pub ser: Option<f64>,
    pub ser_ci99: Option<(f64, f64)>,
    pub analytic_ser: Option<f64>,
}

/// Runs the configured scenario and pairs each estimate with its closed form.
/// With a single observed user the analytic side refers to that user;
/// otherwise rates and probabilities are averaged over the cell.
pub fn montecarlo_summary(settings: &Settings, ser: bool, user: Option<usize>) -> anyhow::Result<MontecarloSummary> {
    let cfg = settings.system();
    let profile = settings.scenario.build_profile()?;
    let mut plan = settings.plan(cfg, profile, settings.seed)?;
    if let Some(k) = user {
        plan.users = Users::One(k);
    }
    let stats = if ser { run_ser_trials(&plan)? } else { run_sinr_trials(&plan)? };
    let params = plan.sinr_params()?;
    let observed: Vec<_> = match user {
        Some(k) => vec![params[k]],
        None => params.clone(),
    };
    let n = observed.len() as f64;
    let rates = params.iter().map(rate_closed).collect::<Result<Vec<_>, _>>()?;
    let analytic_rate = match user {
        Some(k) => rates[k],
        None => rates.iter().sum::<f64>() / n,
    };
    let analytic_outage = observed.iter().map(|p| mimo_zf::analytic::outage(p, plan.gamma_th)).sum::<f64>() / n;
    let analytic_ser = if ser {
        let total: f64 = observed
            .iter()
            .map(|p| ser_exact(p, cfg.qam_order))
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .sum();
        Some(total / n)
    } else {
        None
    };
    let spectral = match user {
        None => Some(spectral_efficiency(&cfg, &stats.user_rates)?),
        Some(_) => None,
    };
    Ok(MontecarloSummary {
        trials: stats.trial_count,
        redraws: stats.redraws,
        mean_sinr: stats.mean_sinr,
        se_sinr: stats.se_sinr,
        median_sinr: stats.median(),
        mean_rate: stats.mean_rate,
        se_rate: stats.se_rate,
        analytic_rate,
        gamma_th_db: mimo_zf::linear_to_db(plan.gamma_th),
        outage: stats.outage_rate,
        analytic_outage,
        spectral_efficiency: spectral,
        analytic_spectral_efficiency: spectral_efficiency(&cfg, &rates)?,
        norm_err_db: stats.norm_err_db,
        ser: stats.ser.map(|s| s.estimate),
        ser_ci99: stats.ser.map(|s| s.ci99),
        analytic_ser,
    })
}
