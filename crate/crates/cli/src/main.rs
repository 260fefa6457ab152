//! `jointcok`: run theory tables, simulations, moment estimates, moment
//! inversion, non-abelian moment tables and Smith normal forms from a config
//! file. Exit status 0 when every verdict passes, 1 when one fails, 2 on error.

mod commands;
mod config;
mod error;
mod output;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::{CliError, CliResult};
use output::RunOutput;

#[derive(Parser)]
#[command(name = "jointcok", version, about = "Joint cokernel and random quotient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form densities and moments for the `[theory]` targets.
    Theory(RunArgs),
    /// Monte Carlo joint cokernel table (`[simulate]`) or sparse zero-row probe (`[probe]`).
    Simulate(RunArgs),
    /// Monte Carlo mixed moments for the `[moment]` targets.
    Moment(RunArgs),
    /// Exact inversion of a moment table on the `[invert]` lattice.
    Invert(RunArgs),
    /// Exact surjection moments of random quotients of free groups.
    Nonabelian(RunArgs),
    /// Smith normal form of the `[snf]` matrix, or of a literal on stdin.
    Snf(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn missing(section: &str) -> CliError {
    CliError::Config(format!("config has no [{section}] section"))
}

fn load(args: &RunArgs) -> CliResult<RunConfig> {
    match &args.config {
        Some(path) => RunConfig::load(path),
        None => Err(CliError::Config("--config is required".into())),
    }
}

/// Keeps only what the command reads, with the effective seed filled in.
fn effective(seed: u64, mut pick: impl FnMut(&mut RunConfig)) -> RunConfig {
    let mut c = RunConfig {
        seed: Some(seed),
        ..Default::default()
    };
    pick(&mut c);
    c
}

fn run(cli: Cli) -> CliResult<bool> {
    let (name, args) = match &cli.command {
        Command::Theory(a) => ("theory", a),
        Command::Simulate(a) => ("simulate", a),
        Command::Moment(a) => ("moment", a),
        Command::Invert(a) => ("invert", a),
        Command::Nonabelian(a) => ("nonabelian", a),
        Command::Snf(a) => ("snf", a),
    };
    let cfg = if name == "snf" && args.config.is_none() {
        let mut literal = String::new();
        std::io::stdin()
            .read_to_string(&mut literal)
            .map_err(|e| CliError::Io("stdin".into(), e))?;
        RunConfig {
            snf: Some(config::SnfSection { matrix: literal }),
            ..Default::default()
        }
    } else {
        load(args)?
    };
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let workers = args.workers;
    let start = |c: RunConfig| RunOutput::create(&args.out, name, c.canonical()?, seed);
    let pass = match &cli.command {
        Command::Theory(_) => {
            let sec = cfg.theory.clone().ok_or_else(|| missing("theory"))?;
            let out = start(effective(seed, |c| c.theory = Some(sec.clone())))?;
            commands::theory(&sec, &out)?
        }
        Command::Simulate(_) => match (&cfg.simulate, &cfg.probe) {
            (Some(sec), None) => {
                let out = start(effective(seed, |c| c.simulate = Some(sec.clone())))?;
                commands::simulate(sec, seed, workers, &out)?
            }
            (None, Some(sec)) => {
                let out = start(effective(seed, |c| c.probe = Some(sec.clone())))?;
                commands::probe(sec, seed, workers, &out)?
            }
            (Some(_), Some(_)) => return Err(CliError::Config("give either [simulate] or [probe], not both".into())),
            (None, None) => return Err(missing("simulate")),
        },
        Command::Moment(_) => {
            let sec = cfg.moment.clone().ok_or_else(|| missing("moment"))?;
            let out = start(effective(seed, |c| c.moment = Some(sec.clone())))?;
            commands::moment(&sec, seed, workers, &out)?
        }
        Command::Invert(_) => {
            let sec = cfg.invert.clone().ok_or_else(|| missing("invert"))?;
            let out = start(effective(seed, |c| c.invert = Some(sec.clone())))?;
            commands::invert(&sec, &out)?
        }
        Command::Nonabelian(_) => {
            let sec = cfg.nonabelian.clone().ok_or_else(|| missing("nonabelian"))?;
            let out = start(effective(seed, |c| c.nonabelian = Some(sec.clone())))?;
            commands::nonabelian(&sec, seed, workers, &out)?
        }
        Command::Snf(_) => {
            let sec = cfg.snf.clone().ok_or_else(|| missing("snf"))?;
            let out = start(effective(seed, |c| c.snf = Some(sec.clone())))?;
            commands::snf(&sec.matrix, &out)?
        }
    };
    Ok(pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
