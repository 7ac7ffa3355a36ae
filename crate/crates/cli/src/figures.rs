//! The seven figure scenarios: each curve pairs a closed-form column with a
//! Monte-Carlo estimate and its 99% interval.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use mimo_zf::analytic::{outage, rate_closed, ser_exact, spectral_ceiling, spectral_efficiency};
use mimo_zf::channel::error_variance;
use mimo_zf::model::fixed_cross_gain_profile;
use mimo_zf::montecarlo::{run_ser_trials, run_sinr_trials, sub_seed, wilson_interval, AggregateStats, TrialPlan, Users, Z99};
use mimo_zf::{db_to_linear, linear_to_db, SystemConfig};
use serde::Serialize;

use crate::settings::Settings;
use crate::svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }

    fn index(self) -> u64 {
        self as u64 + 1
    }
}

/// One CSV line. Analytic-only curves leave the Monte-Carlo fields empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub x: f64,
    pub analytic_y: f64,
    pub mc_y: Option<f64>,
    pub mc_ci_low: Option<f64>,
    pub mc_ci_high: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    /// File-name fragment, e.g. `M100`.
    pub name: String,
    pub label: String,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub id: FigureId,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub curves: Vec<Curve>,
}

const FIXED_CROSS_GAIN: f64 = 0.05;

fn analytic_row(x: f64, y: f64) -> Row {
    Row {
        x,
        analytic_y: y,
        mc_y: None,
        mc_ci_low: None,
        mc_ci_high: None,
    }
}

fn with_mc(x: f64, analytic: f64, mc: f64, ci: (f64, f64)) -> Row {
    Row {
        x,
        analytic_y: analytic,
        mc_y: Some(mc),
        mc_ci_low: Some(ci.0),
        mc_ci_high: Some(ci.1),
    }
}

struct Runner<'a> {
    settings: &'a Settings,
    fig: FigureId,
}

impl Runner<'_> {
    fn plan(&self, cfg: SystemConfig, cross: f64, curve: u64, point: u64) -> anyhow::Result<TrialPlan> {
        let profile = fixed_cross_gain_profile(&cfg, cross)?;
        let seed = sub_seed(self.settings.seed, self.fig.index() << 32 | curve, point);
        self.settings.plan(cfg, profile, seed)
    }

    /// Closed-form and simulated spectral efficiency of cell 0.
    fn spectral_point(&self, cfg: SystemConfig, cross: f64, x: f64, curve: u64, point: u64) -> anyhow::Result<Row> {
        let plan = self.plan(cfg, cross, curve, point)?;
        let rates = plan.sinr_params()?.iter().map(rate_closed).collect::<Result<Vec<_>, _>>()?;
        let analytic = spectral_efficiency(&cfg, &rates)?;
        let stats = run_sinr_trials(&plan)?;
        let mc = spectral_efficiency(&cfg, &stats.user_rates)?;
        let scale = mc / stats.mean_rate.max(f64::MIN_POSITIVE);
        let half = Z99 * stats.se_rate * scale;
        Ok(with_mc(x, analytic, mc, (mc - half, mc + half)))
    }

    fn ceiling(&self, cfg: SystemConfig, cross: f64) -> anyhow::Result<f64> {
        let profile = fixed_cross_gain_profile(&cfg, cross)?;
        Ok(spectral_ceiling(&cfg, &profile, 0)?)
    }
}

fn outage_row(stats: &AggregateStats, x: f64, analytic: f64, gamma_th: f64) -> Row {
    let n = stats.empirical_cdf.len() as u64;
    let hits = (stats.ecdf(gamma_th) * n as f64).round() as u64;
    with_mc(x, analytic, hits as f64 / n as f64, wilson_interval(hits, n, Z99))
}

fn snr_grid() -> Vec<f64> {
    (0..=8).map(|i| -10.0 + 5.0 * i as f64).collect()
}

/// Evaluates every curve of figure `id`.
pub fn build_figure(id: FigureId, settings: &Settings) -> anyhow::Result<Figure> {
    let base = settings.system();
    let run = Runner { settings, fig: id };
    let spectral_label = "spectral efficiency per cell (bits/s/Hz)".to_string();
    let (title, x_label, y_label, log_y, curves) = match id {
        FigureId::Fig1 => {
            let mut curves = Vec::new();
            for (c, m) in [20usize, 50, 100, 200, 300, 500].into_iter().enumerate() {
                if m < base.users {
                    continue;
                }
                let rows = snr_grid()
                    .into_iter()
                    .enumerate()
                    .map(|(i, snr)| {
                        let cfg = SystemConfig { antennas: m, ..base }.with_snr_db(snr);
                        run.spectral_point(cfg, FIXED_CROSS_GAIN, snr, c as u64, i as u64)
                    })
                    .collect::<anyhow::Result<_>>()?;
                curves.push(Curve { name: format!("M{m}"), label: format!("M = {m}"), rows });
            }
            let limit = run.ceiling(base, FIXED_CROSS_GAIN)?;
            curves.push(Curve {
                name: "Minf".into(),
                label: "M → ∞".into(),
                rows: snr_grid().into_iter().map(|snr| analytic_row(snr, limit)).collect(),
            });
            ("Spectral efficiency vs SNR, β = 0.05", "SNR (dB)", spectral_label, false, curves)
        }
        FigureId::Fig2 => {
            let grid = [0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5];
            let mut curves = Vec::new();
            for (c, m) in [50usize, 100, 200].into_iter().enumerate() {
                let cfg = SystemConfig { antennas: m, ..base };
                let rows = grid
                    .iter()
                    .enumerate()
                    .map(|(i, beta)| run.spectral_point(cfg, *beta, *beta, c as u64, i as u64))
                    .collect::<anyhow::Result<_>>()?;
                curves.push(Curve { name: format!("M{m}"), label: format!("M = {m}"), rows });
            }
            let rows = grid
                .iter()
                .map(|beta| Ok(analytic_row(*beta, run.ceiling(base, *beta)?)))
                .collect::<anyhow::Result<_>>()?;
            curves.push(Curve { name: "Minf".into(), label: "M → ∞".into(), rows });
            ("Spectral efficiency vs cross gain", "cross gain β", spectral_label, false, curves)
        }
        FigureId::Fig3 => {
            let thresholds: Vec<f64> = (0..=15).map(|i| -10.0 + 2.0 * i as f64).collect();
            let mut curves = Vec::new();
            for (c, m) in [40usize, 60, 80, 100].into_iter().enumerate() {
                let cfg = SystemConfig { antennas: m, ..base };
                let mut plan = run.plan(cfg, FIXED_CROSS_GAIN, c as u64, 0)?;
                plan.users = Users::One(0);
                let stats = run_sinr_trials(&plan)?;
                let p = plan.sinr_params()?[0];
                let rows = thresholds
                    .iter()
                    .map(|db| {
                        let g = db_to_linear(*db);
                        outage_row(&stats, *db, outage(&p, g), g)
                    })
                    .collect();
                curves.push(Curve { name: format!("M{m}"), label: format!("M = {m}"), rows });
            }
            ("Outage probability vs threshold, β = 0.05", "SINR threshold (dB)", "outage probability".into(), true, curves)
        }
        FigureId::Fig4 => {
            let gamma_th = db_to_linear(1.0);
            let grid = [20usize, 30, 40, 60, 80, 100, 150, 200];
            let mut curves = Vec::new();
            for (c, beta) in [0.05, 0.1, 0.15, 0.2].into_iter().enumerate() {
                let mut rows = Vec::new();
                for (i, m) in grid.iter().copied().filter(|m| *m >= base.users).enumerate() {
                    let cfg = SystemConfig { antennas: m, ..base };
                    let mut plan = run.plan(cfg, beta, c as u64, i as u64)?;
                    plan.users = Users::One(0);
                    plan.gamma_th = gamma_th;
                    let stats = run_sinr_trials(&plan)?;
                    let p = plan.sinr_params()?[0];
                    rows.push(outage_row(&stats, m as f64, outage(&p, gamma_th), gamma_th));
                }
                curves.push(Curve { name: format!("beta{beta}"), label: format!("β = {beta}"), rows });
            }
            ("Outage probability vs M, γ_th = 1 dB", "BS antennas M", "outage probability".into(), true, curves)
        }
        FigureId::Fig5 => {
            let grid = [20usize, 30, 40, 50, 60, 70, 80, 90, 100];
            let mut curves = Vec::new();
            for (c, order) in [4u32, 16, 64].into_iter().enumerate() {
                let mut rows = Vec::new();
                for (i, m) in grid.iter().copied().filter(|m| *m >= base.users).enumerate() {
                    let cfg = SystemConfig { antennas: m, qam_order: order, ..base };
                    let plan = run.plan(cfg, 0.1, c as u64, i as u64)?;
                    let analytic = ser_exact(&plan.sinr_params()?[0], order)?;
                    let ser = run_ser_trials(&plan)?.ser.expect("SER mode");
                    rows.push(with_mc(m as f64, analytic, ser.estimate, ser.ci99));
                }
                curves.push(Curve { name: format!("qam{order}"), label: format!("{order}-QAM"), rows });
            }
            ("SER vs M, β = 0.1", "BS antennas M", "symbol error rate".into(), true, curves)
        }
        FigureId::Fig6 => {
            let mut curves = Vec::new();
            for (c, beta) in [0.05, 0.1, 0.2].into_iter().enumerate() {
                let mut rows = Vec::new();
                for cells in 1..=7usize {
                    let cfg = SystemConfig { cells, ..base };
                    let plan = run.plan(cfg, beta, c as u64, cells as u64)?;
                    let err: f64 = (0..cfg.users).map(|k| error_variance(&cfg, &plan.profile, 0, 0, k)).sum();
                    let gain: f64 = (0..cfg.users).map(|k| plan.profile.desired(0, k)).sum();
                    let stats = run_sinr_trials(&plan)?;
                    rows.push(with_mc(cells as f64, linear_to_db(err / gain), stats.norm_err_db, stats.norm_err_ci_db));
                }
                curves.push(Curve { name: format!("beta{beta}"), label: format!("β = {beta}"), rows });
            }
            ("Normalized estimation error vs L", "cells L", "normalized error (dB)".into(), false, curves)
        }
        FigureId::Fig7 => {
            let mut curves = Vec::new();
            for (c, m) in [50usize, 100, 500].into_iter().enumerate() {
                let rows = (1..=7usize)
                    .map(|cells| {
                        let cfg = SystemConfig { cells, antennas: m, ..base };
                        run.spectral_point(cfg, FIXED_CROSS_GAIN, cells as f64, c as u64, cells as u64)
                    })
                    .collect::<anyhow::Result<_>>()?;
                curves.push(Curve { name: format!("M{m}"), label: format!("M = {m}"), rows });
            }
            // a single cell has no finite large-M ceiling
            let rows = (2..=7usize)
                .map(|cells| Ok(analytic_row(cells as f64, run.ceiling(SystemConfig { cells, ..base }, FIXED_CROSS_GAIN)?)))
                .collect::<anyhow::Result<_>>()?;
            curves.push(Curve { name: "Minf".into(), label: "M → ∞".into(), rows });
            ("Spectral efficiency vs L, β = 0.05", "cells L", spectral_label, false, curves)
        }
    };
    Ok(Figure {
        id,
        title: title.into(),
        x_label: x_label.into(),
        y_label,
        log_y,
        curves,
    })
}

/// Serializes one curve as CSV text.
pub fn curve_csv(curve: &Curve) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &curve.rows {
        anyhow::ensure!(
            [Some(row.x), Some(row.analytic_y), row.mc_y, row.mc_ci_low, row.mc_ci_high]
                .iter()
                .flatten()
                .all(|v| v.is_finite()),
            "non-finite value in curve {}: {row:?}",
            curve.name
        );
        w.serialize(row)?;
    }
    Ok(w.into_inner()?)
}

/// Writes one CSV per curve and an SVG overlay into `out_dir`.
pub fn write_figure(figure: &Figure, out_dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut paths = Vec::new();
    for curve in &figure.curves {
        let path = out_dir.join(format!("{}_{}.csv", figure.id.name(), curve.name));
        fs::write(&path, curve_csv(curve)?).with_context(|| format!("writing {}", path.display()))?;
        paths.push(path);
    }
    let path = out_dir.join(format!("{}.svg", figure.id.name()));
    fs::write(&path, svg::render(figure)).with_context(|| format!("writing {}", path.display()))?;
    paths.push(path);
    Ok(paths)
}
