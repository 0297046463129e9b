use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use snooplab::runner::{self, FileConfig, Overrides, Profile};

/// Monte Carlo laboratory for covariate-fishing bias: snooping vs
/// outcome-blinded analysts, and sample-splitting ATT estimation.
#[derive(Parser)]
#[command(name = "snooplab", version, about)]
struct Cli {
    /// TOML config file; missing sections fall back to profile defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV, SVG, and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Master seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Replications per cell (overrides config and profile).
    #[arg(long, global = true)]
    reps: Option<usize>,

    /// Worker threads (0 = library default).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Scale profile: desk (laptop minutes) or paper (full factorial).
    #[arg(long, global = true, value_parser = parse_profile)]
    profile: Option<Profile>,

    /// Also write SVG charts next to the CSV tables.
    #[arg(long, global = true)]
    plots: bool,

    #[command(subcommand)]
    command: Command,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse::<Profile>().map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Bias of snooping and blinded analysts over the (n, p, rho2) grid.
    Grid,
    /// Candidate-estimator correlation and maximized value under noise
    /// blending, against the closed-form approximation.
    Noisecor,
    /// Decay of preference-rank disagreement with sample size.
    Rankagree,
    /// Sample-splitting ATT estimator vs its no-split contrast arm.
    Attsplit,
    /// Monte Carlo check that noise blending does not raise the maximized
    /// estimate, per grid cell.
    #[command(name = "check-noise-condition")]
    CheckNoiseCondition,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match cli.command {
        Command::Grid => runner::Subcommand::Grid,
        Command::Noisecor => runner::Subcommand::NoiseCor,
        Command::Rankagree => runner::Subcommand::RankAgree,
        Command::Attsplit => runner::Subcommand::AttSplit,
        Command::CheckNoiseCondition => runner::Subcommand::CheckNoiseCondition,
    };

    let file = match &cli.config {
        Some(path) => match runner::parse_config_file(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("snooplab: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
        },
        None => FileConfig::default(),
    };
    let overrides = Overrides {
        seed: cli.seed,
        reps: cli.reps,
        threads: cli.threads,
        profile: cli.profile,
        plots: cli.plots,
    };
    let config = match runner::resolve(file, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("snooplab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };

    eprintln!(
        "snooplab {} | {} | profile={} seed={} threads={} out={}",
        env!("CARGO_PKG_VERSION"),
        cmd,
        config.profile,
        config.seed,
        config.threads,
        cli.out.display()
    );
    match runner::run(cmd, &config, &cli.out) {
        Ok(()) => {
            eprintln!("snooplab: wrote {}", cli.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("snooplab: {cmd} failed: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
