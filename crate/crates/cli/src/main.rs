use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gkdv_cli::{load_config, run, sweep, ExperimentKind, RunConfig, RunError, SweepAxis};

/// Coupled gKdV simulator and analytic-norm laboratory.
#[derive(Debug, Parser)]
#[command(name = "gkdv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: <out-root>/<kind>-seed<seed>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root for default output directories.
    #[arg(long, env = "GKDV_OUT_DIR", default_value = "runs")]
    out_root: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Override one key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the system and record invariants, norms and radii.
    Simulate(Common),
    /// Track the analyticity radius and fit its algebraic decay.
    RadiusTrack(Common),
    /// Measure empirical constants of the linear and multilinear estimates.
    EstimateLab(Common),
    /// Propagate the p = 1 soliton and compare with the exact profile.
    SolitonTest(Common),
    /// Solve by Picard iteration on a short window and compare with IF-RK4.
    PicardTest(Common),
    /// Run the configured experiment over a parameter grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// `key=v1,v2,...`; repeatable, axes combine as a Cartesian product.
        #[arg(long, value_name = "KEY=V1,V2")]
        vary: Vec<String>,
        /// Concurrent points (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn out_dir(common: &Common, cfg: &RunConfig, leaf: String) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| common.out_root.join(leaf))
}

fn execute(cli: Cli) -> Result<(), RunError> {
    let log = |line: &str| println!("{line}");
    let (common, kind) = match &cli.command {
        Command::Simulate(c) => (c, Some(ExperimentKind::Simulate)),
        Command::RadiusTrack(c) => (c, Some(ExperimentKind::RadiusTrack)),
        Command::EstimateLab(c) => (c, Some(ExperimentKind::EstimateLab)),
        Command::SolitonTest(c) => (c, Some(ExperimentKind::SolitonTest)),
        Command::PicardTest(c) => (c, Some(ExperimentKind::PicardTest)),
        Command::Sweep { common, .. } => (common, None),
    };
    let cfg = load_config(common.config.as_deref(), kind, common.seed, &common.set)?;
    match &cli.command {
        Command::Sweep { vary, jobs, .. } => {
            let axes = vary
                .iter()
                .map(|v| v.parse::<SweepAxis>())
                .collect::<Result<Vec<_>, _>>()?;
            let root = out_dir(common, &cfg, "sweep".into());
            let jobs = jobs.unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, |n| n.get())
            });
            let (manifest, _) = sweep(&cfg, &axes, &root, jobs, &log)?;
            match manifest.outcome {
                gkdv_cli::RunStatus::Ok => Ok(()),
                gkdv_cli::RunStatus::Failed { exit_code, message, .. } => {
                    eprintln!("error: {message}");
                    std::process::exit(exit_code)
                }
            }
        }
        _ => {
            let dir = out_dir(common, &cfg, format!("{}-seed{}", cfg.kind.as_str(), cfg.seed));
            run(&cfg, &dir, &log).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
