//! Oracle-agreement checks behind the `validate` subcommand. Each check
//! becomes one JSON line in the report.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use mimo_zf::analytic::{
    asymptotic_sinr, mgf, mgf_closed_form, mgf_printed_kappa, mgf_quadrature, outage, rate_closed, rate_quadrature,
    ser_exact, ser_upper, sinr_cdf, sinr_cdf_bare_theta, sinr_pdf,
};
use mimo_zf::channel::{error_variance, estimation_error_traces};
use mimo_zf::model::fixed_cross_gain_profile;
use mimo_zf::montecarlo::{
    estimation_error_variance, ks_critical_1pct, ks_statistic, run_ser_trials, run_sinr_trials, sub_seed,
    wilson_interval, Users, Z99,
};
use mimo_zf::specfun::{integrate, QuadratureSpec};
use mimo_zf::{SinrParams, SystemConfig};
use serde::Serialize;

use crate::settings::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported for comparison only; never fails the run.
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub status: Status,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub detail: String,
}

fn record(check: &str, ok: bool, measured: f64, expected: f64, tolerance: f64, detail: String) -> CheckRecord {
    CheckRecord {
        check: check.into(),
        status: Status::from_bool(ok),
        measured,
        expected,
        tolerance,
        detail,
    }
}

fn info(check: &str, measured: f64, expected: f64, detail: String) -> CheckRecord {
    CheckRecord {
        check: check.into(),
        status: Status::Info,
        measured,
        expected,
        tolerance: f64::NAN,
        detail,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Closed-form parameters with θ doubled, for the mutation check.
fn corrupted(p: &SinrParams) -> anyhow::Result<SinrParams> {
    Ok(SinrParams::from_raw(p.order, 2.0 * p.theta, p.eta, p.scale_x, p.beta_hat)?)
}

/// Grid shared with the bound-ordering check: `M − K`, SNR in dB and the
/// cross gain.
pub fn oracle_grid(base: SystemConfig) -> Vec<(SystemConfig, f64)> {
    let mut grid = Vec::new();
    for excess in [0usize, 5, 10, 20] {
        for snr in [-5.0, 10.0] {
            for cross in [0.05, 0.1] {
                let cfg = SystemConfig { antennas: base.users + excess, ..base }.with_snr_db(snr);
                grid.push((cfg, cross));
            }
        }
    }
    grid
}

fn params(cfg: &SystemConfig, cross: f64) -> anyhow::Result<SinrParams> {
    let profile = fixed_cross_gain_profile(cfg, cross)?;
    let alpha = estimation_error_traces(cfg, &profile, 0)?;
    Ok(mimo_zf::model::derive_sinr_params(cfg, &profile, 0, 0, &alpha)?)
}

/// Runs every check. With `corrupt_theta` the closed-form side of the
/// distribution checks uses `2θ`.
pub fn run_checks(settings: &Settings, corrupt_theta: bool) -> anyhow::Result<Vec<CheckRecord>> {
    let cfg = settings.system();
    let profile = settings.scenario.build_profile()?;
    let mut out = Vec::new();

    // large-M limit against the gains directly
    let desired = profile.gain(0, 0, 0);
    let interference: f64 = (1..cfg.cells).map(|j| profile.gain(j, 0, 0).powi(2)).sum();
    let want = desired * desired / interference;
    let got = asymptotic_sinr(&profile, 0, 0);
    out.push(record("asymptote", rel(got, want) <= 1e-9 || got == want, got, want, 1e-9, "user 0 of cell 0".into()));

    // SINR law against one user's Monte-Carlo samples
    let mut plan = settings.plan(cfg, profile.clone(), sub_seed(settings.seed, 1, 0))?;
    plan.users = Users::One(0);
    let stats = run_sinr_trials(&plan)?;
    let honest = plan.sinr_params()?[0];
    let p = if corrupt_theta { corrupted(&honest)? } else { honest };
    let n = stats.empirical_cdf.len();
    let crit = ks_critical_1pct(n);
    let d = ks_statistic(&stats.empirical_cdf, |s| sinr_cdf(&p, s))?;
    out.push(record("ks_sinr_cdf", d < crit, d, 0.0, crit, format!("{n} samples, 1% critical value")));
    let d_bare = ks_statistic(&stats.empirical_cdf, |s| sinr_cdf_bare_theta(&p, s))?;
    out.push(info("ks_sinr_cdf_bare_theta", d_bare, 0.0, "distribution function with unscaled θ".into()));

    let rate_q = rate_quadrature(&p)?;
    let dev = (stats.mean_rate - rate_q).abs();
    out.push(record(
        "mc_rate",
        dev <= 3.0 * stats.se_rate,
        stats.mean_rate,
        rate_q,
        3.0 * stats.se_rate,
        "tolerance is 3 standard errors".into(),
    ));

    let hits = stats.empirical_cdf.partition_point(|v| *v < plan.gamma_th) as u64;
    let ci = wilson_interval(hits, n as u64, Z99);
    let want = outage(&p, plan.gamma_th);
    out.push(record(
        "outage_mc",
        (ci.0..=ci.1).contains(&want),
        hits as f64 / n as f64,
        want,
        (ci.1 - ci.0) / 2.0,
        format!("Wilson 99% interval [{:.6}, {:.6}] at γ_th = {:.4}", ci.0, ci.1, plan.gamma_th),
    ));

    // closed form against quadrature
    let mut worst = (0.0f64, String::new());
    for (c, cross) in oracle_grid(cfg) {
        let q = params(&c, cross)?;
        let r = rel(rate_closed(&q)?, rate_quadrature(&q)?);
        if r >= worst.0 {
            worst = (r, format!("worst at M={}, SNR={:.0} dB, β={cross}", c.antennas, c.snr_db()));
        }
    }
    out.push(record("rate_closed_vs_quadrature", worst.0 <= 1e-8, worst.0, 0.0, 1e-8, worst.1));

    let mut worst = (0.0f64, String::new());
    for s in [0.5, 1.5, 3.0] {
        let r = rel(mgf(&p, s)?, mgf_quadrature(&honest, s)?);
        if r >= worst.0 {
            worst = (r, format!("worst at s={s}"));
        }
    }
    out.push(record("mgf_vs_quadrature", worst.0 <= 1e-6, worst.0, 0.0, 1e-6, worst.1));

    let mgf_cfg = SystemConfig { antennas: 50.max(cfg.users), ..cfg };
    let q = params(&mgf_cfg, 0.1)?;
    let q_closed = if corrupt_theta { corrupted(&q)? } else { q };
    let mut worst = (0.0f64, String::new());
    for s in [0.5, 1.5, 3.0] {
        let quad = mgf_quadrature(&q, s)?;
        let r = rel(mgf_closed_form(&q_closed, s)?, quad);
        if r >= worst.0 {
            worst = (r, format!("worst at s={s}, M={}, β=0.1", mgf_cfg.antennas));
        }
        let printed = mgf_printed_kappa(&q, s, mgf_cfg.pilot_energy())?;
        out.push(info("mgf_printed_kappa", printed, quad, format!("s={s}, against quadrature")));
    }
    out.push(record("mgf_closed_form_vs_quadrature", worst.0 <= 1e-6, worst.0, 0.0, 1e-6, worst.1));

    // SER: 10⁵ symbols spread over the trials
    let mut plan = settings.plan(cfg, profile.clone(), sub_seed(settings.seed, 2, 0))?;
    plan.symbols_per_trial = 100_000usize.div_ceil(settings.trials * cfg.users).max(1);
    let ser_stats = run_ser_trials(&plan)?.ser.expect("SER mode");
    let all = plan.sinr_params()?;
    let want = all
        .iter()
        .map(|q| {
            let q = if corrupt_theta { corrupted(q)? } else { *q };
            Ok(ser_exact(&q, cfg.qam_order)?)
        })
        .sum::<anyhow::Result<f64>>()?
        / cfg.users as f64;
    let (lo, hi) = ser_stats.ci99;
    out.push(record(
        "ser_mc",
        (lo..=hi).contains(&want),
        ser_stats.estimate,
        want,
        (hi - lo) / 2.0,
        format!("{} symbols, Wilson 99% interval [{lo:.3e}, {hi:.3e}]", ser_stats.symbols),
    ));

    let mut violations = 0;
    let mut worst = (f64::INFINITY, String::new());
    for (c, cross) in oracle_grid(cfg) {
        let q = params(&c, cross)?;
        for order in [4u32, 16, 64] {
            let gap = ser_upper(&q, order)? - ser_exact(&q, order)?;
            if gap < 0.0 {
                violations += 1;
            }
            if gap < worst.0 {
                worst = (gap, format!("M={}, SNR={:.0} dB, β={cross}, {order}-QAM", c.antennas, c.snr_db()));
            }
        }
    }
    out.push(record(
        "ser_upper_ordering",
        violations == 0,
        worst.0,
        0.0,
        0.0,
        format!("{violations} grid points with upper < exact; smallest gap at {}", worst.1),
    ));

    let cross = match settings.scenario.scenario {
        mimo_zf::model::Scenario::Fixed { cross_gain } => cross_gain,
        _ => 0.05,
    };
    let r40 = rate_quadrature(&params(&cfg.with_snr_db(40.0), cross)?)?;
    let r60 = rate_quadrature(&params(&cfg.with_snr_db(60.0), cross)?)?;
    out.push(record("rate_saturation", rel(r40, r60) < 5e-3, rel(r40, r60), 0.0, 5e-3, format!("{r40:.6} vs {r60:.6} bits/s/Hz")));

    // density against the distribution function
    let ceiling = p.sinr_ceiling();
    let spec = QuadratureSpec::new(1e-14, 1e-10, 4000)?;
    let pdf = |s: f64| sinr_pdf(&p, s).unwrap_or(0.0);
    let hi = if ceiling.is_finite() { ceiling } else { stats.quantile(1.0) * 4.0 };
    let (a, b) = (stats.quantile(0.25), stats.quantile(0.75));
    let total = integrate(pdf, 0.0, a, &spec)? + integrate(pdf, a, b, &spec)? + integrate(pdf, b, hi, &spec)?;
    out.push(record("pdf_normalization", (total - 1.0).abs() <= 1e-7, total, 1.0, 1e-7, "over the full support".into()));
    let part = integrate(pdf, a, b, &spec)?;
    let diff = sinr_cdf(&p, b) - sinr_cdf(&p, a);
    out.push(record("pdf_vs_cdf", (part - diff).abs() <= 1e-7, part, diff, 1e-7, format!("over [{a:.4}, {b:.4}]")));

    if ceiling.is_finite() {
        let v = outage(&p, ceiling * (1.0 + 1e-9));
        out.push(record("outage_beyond_ceiling", v == 1.0, v, 1.0, 0.0, format!("γ_th just above 1/η = {ceiling:.4}")));
    }

    // estimation error statistics
    let draws = settings.trials.max(2);
    let ev = estimation_error_variance(&cfg, &profile, 0, draws, sub_seed(settings.seed, 3, 0))?;
    let (mut worst_k, mut worst_r) = (0, 0.0f64);
    for (k, m) in ev.per_user.iter().enumerate() {
        let r = rel(m.mean, error_variance(&cfg, &profile, 0, 0, k));
        if r > worst_r {
            (worst_k, worst_r) = (k, r);
        }
    }
    out.push(record(
        "estimation_error_variance",
        worst_r <= 0.05,
        worst_r,
        0.0,
        0.05,
        format!("largest relative deviation at user {worst_k}, {draws} draws"),
    ));
    let alpha = estimation_error_traces(&cfg, &profile, 0)?;
    let tp = cfg.pilot_energy();
    let noise_share: f64 = (0..cfg.users)
        .map(|k| profile.gain(0, 0, k) / (tp * (profile.total_gain(0, k) + 1.0 / tp)))
        .sum();
    let want = alpha[0] + noise_share;
    out.push(record(
        "alpha_trace_identity",
        (ev.total.mean - want).abs() <= 3.0 * ev.total.se,
        ev.total.mean,
        want,
        3.0 * ev.total.se,
        format!("error trace {:.6} plus noise share {noise_share:.6}", alpha[0]),
    ));

    Ok(out)
}

/// Writes one JSON object per line.
pub fn write_report(records: &[CheckRecord], path: &Path) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    for r in records {
        serde_json::to_writer(&mut file, r)?;
        file.write_all(b"\n")?;
    }
    Ok(())
}
