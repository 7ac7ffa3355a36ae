//! `analytic` subcommand: a closed form tabulated over a grid.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use mimo_zf::analytic::{asymptotic_sinr, outage, rate_closed, ser_exact, sinr_cdf, sinr_pdf};
use mimo_zf::{SinrParams, SystemConfig};
use serde::Serialize;

use crate::settings::{check_antennas, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Ergodic rate (bits/s/Hz) against M
    Rate,
    /// Outage probability against a linear SINR threshold
    Outage,
    /// Exact QAM symbol error rate against M
    Ser,
    /// SINR density against linear SINR
    Pdf,
    /// SINR distribution function against linear SINR
    Cdf,
    /// Large-M SINR of every user in the observed cell
    Asymptote,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::Rate => "rate",
            Quantity::Outage => "outage",
            Quantity::Ser => "ser",
            Quantity::Pdf => "pdf",
            Quantity::Cdf => "cdf",
            Quantity::Asymptote => "asymptote",
        }
    }

    fn over_antennas(self) -> bool {
        matches!(self, Quantity::Rate | Quantity::Ser)
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyticArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Grid start; defaults to 0 for SINR grids and K for M grids
    #[arg(long)]
    pub from: Option<f64>,
    /// Grid end; defaults to the SINR ceiling 1/η or to 4·M of the config
    #[arg(long)]
    pub to: Option<f64>,
    /// Number of grid points
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    /// Observed user in cell 0
    #[arg(long, default_value_t = 0)]
    pub user: usize,
}

#[derive(Debug, Serialize)]
struct Row {
    x: f64,
    value: f64,
}

fn linspace(from: f64, to: f64, points: usize) -> anyhow::Result<Vec<f64>> {
    if !from.is_finite() || !to.is_finite() || to < from {
        bail!("invalid grid [{from}, {to}]");
    }
    match points {
        0 => bail!("grid needs at least one point"),
        1 => Ok(vec![from]),
        _ => Ok((0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect()),
    }
}

/// The fading profile depends on L and K only, so M may vary freely.
fn params_at(settings: &Settings, cfg: SystemConfig, user: usize) -> anyhow::Result<SinrParams> {
    let plan = settings.plan(cfg, settings.scenario.build_profile()?, settings.seed)?;
    Ok(plan.sinr_params()?[user])
}

/// Evaluates the requested quantity; returns `(x, value)` pairs.
pub fn evaluate(args: &AnalyticArgs, settings: &Settings) -> anyhow::Result<Vec<(f64, f64)>> {
    let cfg = settings.system();
    if args.user >= cfg.users {
        bail!("user {} outside a K={} cell", args.user, cfg.users);
    }
    match args.quantity {
        Quantity::Asymptote => {
            let profile = settings.scenario.build_profile()?;
            Ok((0..cfg.users).map(|k| (k as f64, asymptotic_sinr(&profile, 0, k))).collect())
        }
        q if q.over_antennas() => {
            let from = args.from.unwrap_or(cfg.users as f64);
            let to = args.to.unwrap_or(4.0 * cfg.antennas as f64);
            let mut ms: Vec<usize> = linspace(from, to, args.points)?.iter().map(|m| m.round() as usize).collect();
            ms.dedup();
            let mut rows = Vec::with_capacity(ms.len());
            for m in ms {
                if m < cfg.users {
                    bail!("M = {m} is below K = {}", cfg.users);
                }
                check_antennas(m)?;
                let c = SystemConfig { antennas: m, ..cfg };
                let p = params_at(settings, c, args.user)?;
                let v = match q {
                    Quantity::Rate => rate_closed(&p)?,
                    _ => ser_exact(&p, c.qam_order)?,
                };
                rows.push((m as f64, v));
            }
            Ok(rows)
        }
        q => {
            let p = params_at(settings, cfg, args.user)?;
            let from = args.from.unwrap_or(0.0);
            let to = args.to.unwrap_or_else(|| p.sinr_ceiling());
            if from < 0.0 {
                bail!("SINR grid must start at a nonnegative value, got {from}");
            }
            linspace(from, to, args.points)?
                .into_iter()
                .map(|s| {
                    let v = match q {
                        Quantity::Outage => outage(&p, s),
                        Quantity::Cdf => sinr_cdf(&p, s),
                        // zero density on and beyond the ceiling
                        _ if s >= p.sinr_ceiling() => 0.0,
                        _ => sinr_pdf(&p, s)?,
                    };
                    Ok((s, v))
                })
                .collect()
        }
    }
}

/// Writes `<out>/analytic_<quantity>.csv` and returns its path.
pub fn run(args: &AnalyticArgs, settings: &Settings, out_dir: &Path) -> anyhow::Result<PathBuf> {
    let rows = evaluate(args, settings)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let path = out_dir.join(format!("analytic_{}.csv", args.quantity.name()));
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    for (x, value) in rows {
        w.serialize(Row { x, value })?;
    }
    w.flush()?;
    Ok(path)
}
