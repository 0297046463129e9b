//! Experiment dispatch: resolves a configuration, runs the selected study
//! on a worker pool, and writes CSV tables, optional SVG charts, and a
//! manifest sufficient to reproduce the run byte for byte.

pub mod config;
mod csv_out;
mod svg;

pub use config::{
    parse_config_file, resolve, FileConfig, Overrides, Profile, ResolvedConfig, DEFAULT_SEED,
};
pub use csv_out::{
    ATT_HEADER, GRID_HEADER, NOISECOR_HEADER, NOISE_CONDITION_HEADER, RANKAGREE_HEADER,
};

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::datagen::SimConfig;
use crate::error::{Error, Result};
use crate::experiments::{
    bias_ratio, check_noise_condition, run_bias_grid, run_noise_correlation,
    run_rank_agreement, AnalystVariant, RankProxy, SummaryRow,
};
use crate::{att_split, experiments};
use csv_out::NoiseConditionEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Grid,
    NoiseCor,
    RankAgree,
    AttSplit,
    CheckNoiseCondition,
}

impl Subcommand {
    pub fn label(&self) -> &'static str {
        match self {
            Subcommand::Grid => "grid",
            Subcommand::NoiseCor => "noisecor",
            Subcommand::RankAgree => "rankagree",
            Subcommand::AttSplit => "attsplit",
            Subcommand::CheckNoiseCondition => "check-noise-condition",
        }
    }
}

impl std::fmt::Display for Subcommand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Subcommand::Grid),
            "noisecor" => Ok(Subcommand::NoiseCor),
            "rankagree" => Ok(Subcommand::RankAgree),
            "attsplit" => Ok(Subcommand::AttSplit),
            "check-noise-condition" => Ok(Subcommand::CheckNoiseCondition),
            other => Err(Error::invalid_argument(format!(
                "unknown subcommand '{other}'"
            ))),
        }
    }
}

/// Run metadata written next to every output set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunInfo {
    pub subcommand: String,
    pub tool_version: String,
    pub seed: u64,
    pub threads: usize,
    pub out_dir: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// Replications lost to degenerate designs, summed over grid rows.
    pub row_failures: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub run: RunInfo,
    pub config: ResolvedConfig,
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::ConfigRead {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::ConfigParse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Executes one experiment and writes its outputs under `out_dir`.
pub fn run(cmd: Subcommand, config: &ResolvedConfig, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let started_unix = unix_now();

    let row_failures = if config.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| dispatch(cmd, config, out_dir))?
    } else {
        dispatch(cmd, config, out_dir)?
    };

    let manifest = Manifest {
        run: RunInfo {
            subcommand: cmd.label().to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            threads: config.threads,
            out_dir: out_dir.display().to_string(),
            started_unix,
            finished_unix: unix_now(),
            row_failures,
        },
        config: config.clone(),
    };
    let text = toml::to_string_pretty(&manifest)
        .map_err(|e| Error::InvalidConfig(format!("manifest serialization: {e}")))?;
    let path = out_dir.join("manifest.toml");
    std::fs::write(&path, text).map_err(|source| Error::Io { path, source })?;
    Ok(())
}

fn dispatch(cmd: Subcommand, config: &ResolvedConfig, out_dir: &Path) -> Result<usize> {
    match cmd {
        Subcommand::Grid => {
            let spec = config.grid.to_spec(config.seed)?;
            let rows = run_bias_grid(&spec)?;
            csv_out::write_grid_csv(&out_dir.join("grid.csv"), &rows, config.seed)?;
            if config.plots {
                write_grid_plots(&rows, out_dir)?;
            }
            Ok(rows.iter().map(|r| r.failures).sum())
        }
        Subcommand::NoiseCor => {
            let spec = config.noisecor.to_spec(config.seed)?;
            let rows = run_noise_correlation(&spec)?;
            csv_out::write_noisecor_csv(&out_dir.join("noisecor.csv"), &rows)?;
            if config.plots {
                write_noisecor_plot(&rows, out_dir)?;
            }
            Ok(0)
        }
        Subcommand::RankAgree => {
            let template = config.rankagree.template(config.seed)?;
            let proxy = if config.rankagree.learned_proxy {
                RankProxy::LearnedMu {
                    folds: config.grid.lasso_folds,
                    lambda_count: config.grid.lasso_lambda_count,
                }
            } else {
                RankProxy::TrueMu
            };
            let rows = run_rank_agreement(
                &config.rankagree.n,
                &template,
                config.rankagree.j,
                config.rankagree.k,
                config.rankagree.replications,
                proxy,
            )?;
            csv_out::write_rankagree_csv(&out_dir.join("rankagree.csv"), &rows)?;
            if config.plots {
                write_rankagree_plot(&rows, out_dir)?;
            }
            Ok(0)
        }
        Subcommand::AttSplit => {
            let (study, policy) = config.attsplit.to_study(config.seed)?;
            let check = att_split::run_unbiasedness_check(
                &study,
                &policy,
                config.attsplit.replications,
            )?;
            csv_out::write_att_csv(&out_dir.join("att.csv"), &check, policy.label())?;
            if config.plots {
                write_att_plot(&check, out_dir)?;
            }
            Ok(0)
        }
        Subcommand::CheckNoiseCondition => {
            let estimators = config.noise_condition.estimator_kinds()?;
            let nc = &config.noise_condition;
            let mut entries = Vec::new();
            for &est in &estimators {
                for &n in &nc.n {
                    for &p in &nc.p {
                        for &rho2 in &nc.rho2 {
                            let sim = SimConfig::new(n, p, rho2, config.seed)?;
                            let check = check_noise_condition(&sim, est, nc.replications)?;
                            entries.push(NoiseConditionEntry {
                                estimator: est,
                                n,
                                p,
                                rho2,
                                check,
                            });
                        }
                    }
                }
            }
            csv_out::write_noise_condition_csv(
                &out_dir.join("noise_condition.csv"),
                &entries,
            )?;
            Ok(0)
        }
    }
}

fn write_svg(path: PathBuf, contents: String) -> Result<()> {
    std::fs::write(&path, contents).map_err(|source| Error::Io { path, source })
}

/// Scaled-bias panels (analyst x rho2, one line per p) and ratio panels
/// with the theoretical lower bound, one file per estimator.
fn write_grid_plots(rows: &[SummaryRow], out_dir: &Path) -> Result<()> {
    let mut estimators: Vec<_> = rows.iter().map(|r| r.estimator).collect();
    estimators.dedup();
    for est in estimators {
        let sub: Vec<&SummaryRow> = rows.iter().filter(|r| r.estimator == est).collect();
        let mut rho2s: Vec<f64> = sub.iter().map(|r| r.rho2).collect();
        rho2s.sort_by(f64::total_cmp);
        rho2s.dedup();
        let mut ps: Vec<usize> = sub.iter().map(|r| r.p).collect();
        ps.sort_unstable();
        ps.dedup();
        let mut analysts: Vec<AnalystVariant> = Vec::new();
        for r in &sub {
            if !analysts.contains(&r.analyst) {
                analysts.push(r.analyst);
            }
        }

        let mut bias_panels = Vec::new();
        for analyst in &analysts {
            for &rho2 in &rho2s {
                let mut panel = svg::Panel::new(
                    format!("{analyst}, rho2={rho2}"),
                    "n",
                    "bias / sd(Y)",
                );
                panel.log_x = true;
                for &p in &ps {
                    let mut pts: Vec<(f64, f64)> = sub
                        .iter()
                        .filter(|r| r.analyst == *analyst && r.rho2 == rho2 && r.p == p)
                        .map(|r| (r.n as f64, r.scaled_bias))
                        .collect();
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                    panel.series.push(svg::Series {
                        label: format!("p={p}"),
                        points: pts,
                    });
                }
                bias_panels.push(panel);
            }
        }
        write_svg(
            out_dir.join(format!("grid_bias_{est}.svg")),
            svg::render_panels(&bias_panels, rho2s.len().max(1)),
        )?;

        let mut ratio_panels = Vec::new();
        for blind in [AnalystVariant::BlindTrueMu, AnalystVariant::BlindLearnedMu] {
            if !analysts.contains(&blind) {
                continue;
            }
            for &rho2 in &rho2s {
                let mut panel = svg::Panel::new(
                    format!("{blind} / snoop, rho2={rho2}"),
                    "n",
                    "bias ratio",
                );
                panel.log_x = true;
                if blind == AnalystVariant::BlindTrueMu {
                    panel
                        .h_lines
                        .push((rho2.sqrt(), format!("rho={:.3}", rho2.sqrt())));
                }
                for &p in &ps {
                    let mut pts = Vec::new();
                    let mut ns: Vec<usize> = sub.iter().map(|r| r.n).collect();
                    ns.sort_unstable();
                    ns.dedup();
                    for n in ns {
                        let cell: Vec<SummaryRow> = sub
                            .iter()
                            .filter(|r| r.rho2 == rho2 && r.p == p && r.n == n)
                            .map(|r| (*r).clone())
                            .collect();
                        if let Ok(Some(ratio)) = bias_ratio(&cell, blind) {
                            pts.push((n as f64, ratio.ratio));
                        }
                    }
                    panel.series.push(svg::Series {
                        label: format!("p={p}"),
                        points: pts,
                    });
                }
                ratio_panels.push(panel);
            }
        }
        if !ratio_panels.is_empty() {
            write_svg(
                out_dir.join(format!("grid_ratio_{est}.svg")),
                svg::render_panels(&ratio_panels, rho2s.len().max(1)),
            )?;
        }
    }
    Ok(())
}

fn write_noisecor_plot(rows: &[experiments::NoiseCorRow], out_dir: &Path) -> Result<()> {
    let mut rho_xs: Vec<f64> = rows.iter().map(|r| r.rho_x).collect();
    rho_xs.sort_by(f64::total_cmp);
    rho_xs.dedup();

    let mut analytic = svg::Panel::new("approximate correlation", "m", "cor");
    let mut empirical = svg::Panel::new("simulated correlation", "m", "cor");
    let mut max_panel = svg::Panel::new("mean maximized estimate", "m", "E[max]");
    for &rho_x in &rho_xs {
        let pts = |f: &dyn Fn(&experiments::NoiseCorRow) -> f64| {
            let mut v: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.rho_x == rho_x)
                .map(|r| (r.m, f(r)))
                .collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            v
        };
        analytic.series.push(svg::Series {
            label: format!("rho_x={rho_x}"),
            points: pts(&|r| r.analytic_cor),
        });
        empirical.series.push(svg::Series {
            label: format!("rho_x={rho_x}"),
            points: pts(&|r| r.empirical_cor),
        });
        max_panel.series.push(svg::Series {
            label: format!("rho_x={rho_x}"),
            points: pts(&|r| r.expected_max),
        });
    }
    write_svg(
        out_dir.join("noisecor.svg"),
        svg::render_panels(&[analytic, empirical, max_panel], 3),
    )
}

fn write_rankagree_plot(rows: &[experiments::RankAgreementRow], out_dir: &Path) -> Result<()> {
    let mut panel = svg::Panel::new("rank disagreement", "n", "P(order reversal)");
    panel.log_x = true;
    let mut pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.p_disagree)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    panel.series.push(svg::Series {
        label: "disagreement".into(),
        points: pts,
    });
    write_svg(
        out_dir.join("rankagree.svg"),
        svg::render_panels(&[panel], 1),
    )
}

fn write_att_plot(check: &att_split::AttCheck, out_dir: &Path) -> Result<()> {
    let mut panel = svg::Panel::new("split vs no-split bias", "arm", "mean estimate");
    panel.h_lines.push((0.0, "no bias".into()));
    for (x, mean, se, label) in [
        (1.0, check.mean_estimate, check.mc_se, "att_split"),
        (2.0, check.contrast_mean, check.contrast_se, "att_nosplit"),
    ] {
        panel.series.push(svg::Series {
            label: label.into(),
            points: vec![
                (x, mean - 2.0 * se),
                (x, mean),
                (x, mean + 2.0 * se),
            ],
        });
    }
    write_svg(out_dir.join("att.svg"), svg::render_panels(&[panel], 1))
}
