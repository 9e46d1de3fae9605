use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{error, info};

use overhauser::config::{load_config, to_toml, ConfigError};
use overhauser::experiments::{self, Direction, ExperimentConfig, ExperimentName};

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "overhauser", version, about = "Nuclear-spin feedback simulations for a pulsed quantum-dot spin")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Laser-detuning sweeps and drift landscape of the one-pulse sequence.
    OnePulse(RunArgs),
    /// Delay sweeps of the two-pulse Ramsey sequence.
    Fid(RunArgs),
    /// Steady nuclear densities across the three-pulse echo delay.
    Echo(RunArgs),
    /// Fixed points and their stability along the scan.
    Atlas(RunArgs),
    /// Resolve a configuration and print it in internal units.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Up,
    Down,
    Both,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Up => Direction::Up,
            DirectionArg::Down => Direction::Down,
            DirectionArg::Both => Direction::Both,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; the subcommand's preset fills anything missing.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override one key, e.g. `--set kappa_over_alpha="1e4 ps^2"`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
    /// Only report warnings and errors.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Preset used when the configuration names no experiment.
    #[arg(long, value_name = "NAME", default_value = "two_pulse_fid", value_parser = parse_experiment)]
    experiment: ExperimentName,
}

fn parse_experiment(s: &str) -> Result<ExperimentName, String> {
    ExperimentName::parse(s).ok_or_else(|| {
        let names: Vec<&str> = ExperimentName::ALL.iter().map(|n| n.as_str()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn init_logging(quiet: bool) {
    let level = if quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

fn resolve(args: &RunArgs, fallback: ExperimentName, force_name: bool) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = load_config(args.config.as_deref(), &args.overrides, fallback)?;
    if force_name && cfg.name != fallback {
        info!("running {} with the configuration written for {}", fallback, cfg.name);
        cfg.name = fallback;
    }
    if let Some(d) = args.direction {
        cfg.sweep.direction = d.into();
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(name: ExperimentName, args: &RunArgs) -> ExitCode {
    let cfg = match resolve(args, name, true) {
        Ok(cfg) => cfg,
        Err(e) => {
            error!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    info!("{}: writing to {}", cfg.name, cfg.output.dir.display());
    match experiments::run(&cfg) {
        Ok(report) => {
            for f in &report.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{}: {e}", cfg.name);
            ExitCode::from(if e.is_config() { EXIT_USAGE } else { EXIT_RUNTIME })
        }
    }
}

fn validate(args: &ValidateArgs) -> ExitCode {
    match resolve(&args.run, args.experiment, false) {
        Ok(cfg) => {
            print!("{}", to_toml(&cfg));
            ExitCode::SUCCESS
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = match &cli.command {
        Command::OnePulse(a) | Command::Fid(a) | Command::Echo(a) | Command::Atlas(a) => a.quiet,
        Command::Validate(v) => v.run.quiet,
    };
    init_logging(quiet);
    match &cli.command {
        Command::OnePulse(a) => run(ExperimentName::OnePulseHysteresis, a),
        Command::Fid(a) => run(ExperimentName::TwoPulseFid, a),
        Command::Echo(a) => run(ExperimentName::ThreePulseEcho, a),
        Command::Atlas(a) => run(ExperimentName::FixedPointAtlas, a),
        Command::Validate(v) => validate(v),
    }
}
