//! Seeded Monte-Carlo trials of the estimation and ZF detection chain.
//!
//! Trial `i` draws everything from its own ChaCha8 stream seeded with
//! [`sub_seed`]`(master_seed, i, attempt)`, so a trial can be replayed in
//! isolation and the aggregate does not depend on how trials are scheduled.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{complex_normal, draw_channels, estimate_source, estimation_error_traces, pilot_observation};
use crate::model::{derive_sinr_params, FadingProfile, SinrParams, SystemConfig};
use crate::qam::Qam;
use crate::zf::{build_zf, detect, gram_inv_diag};
use crate::{Error, Result};

/// Redraw budget per trial before a rank-deficient configuration is reported.
pub const MAX_ATTEMPTS: u64 = 16;

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.5758293035489004;

/// How trials are scheduled. Results are identical for every choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Rayon's global pool.
    #[default]
    Parallel,
    /// A dedicated pool with this many threads.
    Threads(usize),
    /// The calling thread only.
    Serial,
}

/// Which users of the observed cell contribute SINR samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Users {
    /// Every user, one sample each per trial.
    #[default]
    All,
    /// A single user, giving independent samples across trials.
    One(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub master_seed: u64,
    pub num_trials: usize,
    /// Data symbol periods per trial in SER mode.
    pub symbols_per_trial: usize,
    pub cfg: SystemConfig,
    pub profile: FadingProfile,
    pub cell: usize,
    pub users: Users,
    /// Outage threshold, linear.
    pub gamma_th: f64,
    pub execution: Execution,
}

impl TrialPlan {
    pub fn new(cfg: SystemConfig, profile: FadingProfile, master_seed: u64, num_trials: usize) -> Self {
        Self {
            master_seed,
            num_trials,
            symbols_per_trial: 1,
            cfg,
            profile,
            cell: 0,
            users: Users::All,
            gamma_th: crate::db_to_linear(1.0),
            execution: Execution::Parallel,
        }
    }

    fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        self.profile.check_matches(&self.cfg)?;
        if self.num_trials == 0 {
            return Err(Error::InvalidConfig("at least one trial is required".into()));
        }
        if self.cell >= self.cfg.cells {
            return Err(Error::InvalidConfig(format!("cell {} outside an L={} system", self.cell, self.cfg.cells)));
        }
        if let Users::One(k) = self.users {
            if k >= self.cfg.users {
                return Err(Error::InvalidConfig(format!("user {k} outside a K={} cell", self.cfg.users)));
            }
        }
        Ok(())
    }

    fn tracked(&self) -> Vec<usize> {
        match self.users {
            Users::All => (0..self.cfg.users).collect(),
            Users::One(k) => vec![k],
        }
    }

    /// Analytic parameters of every user in the observed cell.
    pub fn sinr_params(&self) -> Result<Vec<SinrParams>> {
        let alpha = estimation_error_traces(&self.cfg, &self.profile, self.cell)?;
        (0..self.cfg.users)
            .map(|k| derive_sinr_params(&self.cfg, &self.profile, self.cell, k, &alpha))
            .collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial`, redraw `attempt`:
/// `splitmix64(splitmix64(splitmix64(master) ^ trial) ^ attempt)`.
pub fn sub_seed(master: u64, trial: u64, attempt: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ trial) ^ attempt)
}

/// Symbol error counts from the data phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerStats {
    pub symbols: u64,
    pub errors: u64,
    pub estimate: f64,
    /// Wilson 99% interval.
    pub ci99: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateStats {
    pub trial_count: usize,
    /// Rank-deficient draws that were replaced.
    pub redraws: u64,
    /// All SINR samples, ascending.
    pub empirical_cdf: Vec<f64>,
    pub mean_sinr: f64,
    pub se_sinr: f64,
    /// Mean of `log₂(1+γ)` per tracked user.
    pub mean_rate: f64,
    pub se_rate: f64,
    /// Mean rate of each tracked user, in tracking order.
    pub user_rates: Vec<f64>,
    pub gamma_th: f64,
    pub outage_rate: f64,
    pub se_outage: f64,
    /// `10·log10` of the mean of `‖G − Ĝ‖²_F / ‖G‖²_F` over trials.
    pub norm_err_db: f64,
    /// 99% interval of the same mean, in dB.
    pub norm_err_ci_db: (f64, f64),
    pub ser: Option<SerStats>,
}

impl AggregateStats {
    /// Fraction of samples strictly below `x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.empirical_cdf.partition_point(|v| *v < x) as f64 / self.empirical_cdf.len() as f64
    }

    /// Sample quantile by the nearest-rank rule.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.empirical_cdf.len();
        let rank = ((q.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n);
        self.empirical_cdf[rank - 1]
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }
}

struct TrialOutcome {
    sinr: Vec<f64>,
    err_ratio: f64,
    redraws: u64,
    symbols: u64,
    errors: u64,
}

struct Context<'a> {
    plan: &'a TrialPlan,
    params: Vec<SinrParams>,
    tracked: Vec<usize>,
    qam: Option<Qam>,
}

impl Context<'_> {
    fn run(&self, trial: u64) -> Result<TrialOutcome> {
        let plan = self.plan;
        let (cfg, profile, cell) = (&plan.cfg, &plan.profile, plan.cell);
        for attempt in 0..MAX_ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(plan.master_seed, trial, attempt));
            let channels = draw_channels(cfg, profile, cell, &mut rng)?;
            let y = pilot_observation(cfg, &channels, &mut rng);
            let g_hat = estimate_source(cfg, profile, cell, cell, &y);
            let outcome = match &self.qam {
                None => gram_inv_diag(&g_hat).map(|d| (d, 0, 0)),
                Some(qam) => build_zf(&g_hat).map(|rx| {
                    let errors = self.data_phase(qam, &rx, &channels.g, &mut rng);
                    (rx.gram_inv_diag, (plan.symbols_per_trial * cfg.users) as u64, errors)
                }),
            };
            match outcome {
                Ok((diag, symbols, errors)) => {
                    let g = channels.desired();
                    let err_ratio = (g - &g_hat).norm_squared() / g.norm_squared();
                    return Ok(TrialOutcome {
                        sinr: self.tracked.iter().map(|k| self.params[*k].sinr_of(1.0 / diag[*k])).collect(),
                        err_ratio,
                        redraws: attempt,
                        symbols,
                        errors,
                    });
                }
                Err(Error::RankDeficient) => {
                    log::warn!("trial {trial}: rank-deficient estimate, redrawing (attempt {})", attempt + 1);
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::RankDeficient)
    }

    /// Sends random symbols from every user of every cell, detects the
    /// observed cell's users and counts symbol errors.
    fn data_phase(&self, qam: &Qam, rx: &crate::zf::ZfReceiver, g: &[crate::channel::CMatrix], rng: &mut ChaCha8Rng) -> u64 {
        let cfg = &self.plan.cfg;
        let amp = Complex64::from(cfg.tx_power.sqrt());
        let order = qam.order() as usize;
        let mut errors = 0;
        for _ in 0..self.plan.symbols_per_trial {
            let mut y = DVector::from_fn(cfg.antennas, |_, _| complex_normal(rng));
            let mut sent = Vec::new();
            for (src, gi) in g.iter().enumerate() {
                let labels: Vec<usize> = (0..cfg.users).map(|_| rng.random_range(0..order)).collect();
                let x = DVector::from_iterator(cfg.users, labels.iter().map(|l| qam.symbol(*l) * amp));
                y.gemv(Complex64::from(1.0), gi, &x, Complex64::from(1.0));
                if src == self.plan.cell {
                    sent = labels;
                }
            }
            let r = detect(rx, &y);
            let inv = 1.0 / cfg.tx_power.sqrt();
            errors += sent
                .iter()
                .zip(r.iter())
                .filter(|(label, soft)| qam.slice(**soft * inv) != **label)
                .count() as u64;
        }
        errors
    }
}

fn execute(plan: &TrialPlan, qam: Option<Qam>) -> Result<AggregateStats> {
    plan.validate()?;
    let ctx = Context {
        plan,
        params: plan.sinr_params()?,
        tracked: plan.tracked(),
        qam,
    };
    let indices = 0..plan.num_trials as u64;
    let outcomes: Vec<TrialOutcome> = match plan.execution {
        Execution::Serial => indices.map(|i| ctx.run(i)).collect::<Result<_>>()?,
        Execution::Parallel => indices.into_par_iter().map(|i| ctx.run(i)).collect::<Result<_>>()?,
        Execution::Threads(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| indices.into_par_iter().map(|i| ctx.run(i)).collect::<Result<_>>())?,
    };
    Ok(aggregate(plan, &ctx.tracked, &outcomes, ctx.qam.is_some()))
}

fn mean_and_se(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn aggregate(plan: &TrialPlan, tracked: &[usize], outcomes: &[TrialOutcome], ser_mode: bool) -> AggregateStats {
    let per_user = tracked.len() as f64;
    let rate = |g: f64| g.ln_1p() * std::f64::consts::LOG2_E;
    // standard errors come from per-trial averages, since users in one
    // trial share a channel draw
    let (mean_sinr, se_sinr) = mean_and_se(outcomes.iter().map(|o| o.sinr.iter().sum::<f64>() / per_user));
    let (mean_rate, se_rate) = mean_and_se(outcomes.iter().map(|o| o.sinr.iter().map(|g| rate(*g)).sum::<f64>() / per_user));
    let (_, se_outage) = mean_and_se(
        outcomes
            .iter()
            .map(|o| o.sinr.iter().filter(|g| **g < plan.gamma_th).count() as f64 / per_user),
    );
    let user_rates = (0..tracked.len())
        .map(|j| outcomes.iter().map(|o| rate(o.sinr[j])).sum::<f64>() / outcomes.len() as f64)
        .collect();
    let mut samples: Vec<f64> = outcomes.iter().flat_map(|o| o.sinr.iter().copied()).collect();
    samples.sort_by(f64::total_cmp);
    let outage_rate = samples.partition_point(|v| *v < plan.gamma_th) as f64 / samples.len() as f64;
    let (err, se_err) = mean_and_se(outcomes.iter().map(|o| o.err_ratio));
    let db = |v: f64| 10.0 * v.log10();
    let ser = ser_mode.then(|| {
        let symbols = outcomes.iter().map(|o| o.symbols).sum();
        let errors = outcomes.iter().map(|o| o.errors).sum();
        SerStats {
            symbols,
            errors,
            estimate: errors as f64 / symbols as f64,
            ci99: wilson_interval(errors, symbols, Z99),
        }
    });
    AggregateStats {
        trial_count: outcomes.len(),
        redraws: outcomes.iter().map(|o| o.redraws).sum(),
        empirical_cdf: samples,
        mean_sinr,
        se_sinr,
        mean_rate,
        se_rate,
        user_rates,
        gamma_th: plan.gamma_th,
        outage_rate,
        se_outage,
        norm_err_db: db(err),
        norm_err_ci_db: (db((err - Z99 * se_err).max(f64::MIN_POSITIVE)), db(err + Z99 * se_err)),
        ser,
    }
}

/// SINR statistics from the estimation and ZF chain.
pub fn run_sinr_trials(plan: &TrialPlan) -> Result<AggregateStats> {
    execute(plan, None)
}

/// As [`run_sinr_trials`], plus a data phase of `symbols_per_trial` QAM
/// symbol periods per trial through the true channels.
pub fn run_ser_trials(plan: &TrialPlan) -> Result<AggregateStats> {
    if plan.symbols_per_trial == 0 {
        return Err(Error::InvalidConfig("SER mode needs at least one symbol per trial".into()));
    }
    execute(plan, Some(Qam::new(plan.cfg.qam_order)?))
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub mean: f64,
    pub se: f64,
}

/// Empirical per-entry variance of the estimation error `ξ = G − Ĝ` of the
/// observed cell's own channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorVariance {
    /// `E|ξ_mk|²` for each user `k`.
    pub per_user: Vec<Moment>,
    /// `Σ_k E|ξ_mk|²`, comparable with the error traces plus the noise share.
    pub total: Moment,
}

/// Estimates the per-entry estimation error variance from `draws` pilot
/// phases. Draw `d` uses the stream [`sub_seed`]`(seed, d, 0)`.
pub fn estimation_error_variance(
    cfg: &SystemConfig,
    profile: &FadingProfile,
    cell: usize,
    draws: usize,
    seed: u64,
) -> Result<ErrorVariance> {
    cfg.validate()?;
    profile.check_matches(cfg)?;
    if draws < 2 {
        return Err(Error::InvalidConfig("at least two draws are required".into()));
    }
    let m = cfg.antennas as f64;
    let per_draw: Vec<Vec<f64>> = (0..draws as u64)
        .into_par_iter()
        .map(|d| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, d, 0));
            let channels = draw_channels(cfg, profile, cell, &mut rng)?;
            let y = pilot_observation(cfg, &channels, &mut rng);
            let xi = channels.desired() - estimate_source(cfg, profile, cell, cell, &y);
            Ok(xi.column_iter().map(|c| c.norm_squared() / m).collect())
        })
        .collect::<Result<_>>()?;
    let moment = |f: &dyn Fn(&Vec<f64>) -> f64| {
        let (mean, se) = mean_and_se(per_draw.iter().map(f));
        Moment { mean, se }
    };
    Ok(ErrorVariance {
        per_user: (0..cfg.users).map(|k| moment(&|v| v[k])).collect(),
        total: moment(&|v| v.iter().sum()),
    })
}

/// Kolmogorov–Smirnov distance `sup |F_n − F|` between the samples and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.len() < 100 {
        return Err(Error::Domain(format!(
            "KS statistic needs at least 100 samples, got {}",
            samples.len()
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max))
}

/// KS critical value `c(α)/√n` at the 1% level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}
