use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use exp_cli::config::Kind;
use exp_cli::error::{CliError, Result};
use exp_cli::{presets, run, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "mec",
    version,
    about = "AoI models, simulation and equilibrium solvers for edge offloading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic average age of one device.
    Aoi(RunArgs),
    /// Simulate one device and compare with the analytic age.
    Simulate(RunArgs),
    /// Mean-field equilibrium (or best responses at a fixed load).
    Mfe(RunArgs),
    /// Finite-game Nash equilibrium next to the mean-field policy.
    Nash(RunArgs),
    /// Major-minor equilibrium with one primary device.
    MmMfe(RunArgs),
    /// Run any experiment over its sweep axes.
    Sweep(RunArgs),
    /// Analytic age against simulation on fixed points.
    Validate(RunArgs),
    /// Print the built-in presets.
    ListPresets,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file.
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration (see `list-presets`).
    #[arg(long)]
    preset: Option<String>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweep points.
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (sub, args) = match cli.command {
        Command::ListPresets => {
            for p in presets::all() {
                println!("{:<12} {}", p.name, p.target);
            }
            return ExitCode::SUCCESS;
        }
        Command::Aoi(a) => (Kind::Aoi, a),
        Command::Simulate(a) => (Kind::Simulate, a),
        Command::Mfe(a) => (Kind::Mfe, a),
        Command::Nash(a) => (Kind::Nash, a),
        Command::MmMfe(a) => (Kind::MmMfe, a),
        Command::Sweep(a) => (Kind::Sweep, a),
        Command::Validate(a) => (Kind::Validate, a),
    };
    match execute(sub, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(sub: Kind, args: &RunArgs) -> Result<()> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => presets::load(name)?,
        (None, None) => unreachable!("clap requires one of --config and --preset"),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.jobs.is_some() {
        cfg.jobs = args.jobs;
    }
    let kind = cfg.experiment()?;
    if sub == Kind::Sweep {
        if cfg.sweep.axes.is_empty() {
            return Err(CliError::Config(
                "`sweep` needs at least one [[sweep.axis]]".into(),
            ));
        }
    } else if sub != kind {
        return Err(CliError::Config(format!(
            "`{sub}` cannot run a `{kind}` configuration"
        )));
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from));
    let jobs = cfg.jobs.unwrap_or(1);
    let outcome = run(&cfg, jobs)?;
    match out {
        Some(path) => outcome.table.write(&path)?,
        None => std::io::stdout()
            .lock()
            .write_all(outcome.table.to_csv().as_bytes())?,
    }
    outcome.status()
}
