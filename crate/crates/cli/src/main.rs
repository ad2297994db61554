//! `gravmetro`: scenario-driven front end to the redshift metrology library.

mod commands;
mod error;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use gravmetro::metrology::SchemeKind;
use gravmetro::PacketPreset;

use crate::commands::{Axis, Spacing};
use crate::error::CliError;
use crate::output::Report;
use crate::scenario::{locate, Format, Scenario, SCENARIO_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "gravmetro", version, about = "Gravitational redshift metrology with Gaussian light pulses")]
struct Cli {
    /// Scenario JSON file; defaults to `default.json` in the scenario directory,
    /// then to the built-in Earth-to-geostationary single-mode scenario.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,

    /// Directory searched for scenario files.
    #[arg(long, global = true, env = SCENARIO_DIR_ENV)]
    scenario_dir: Option<PathBuf>,

    /// Output format; overrides the scenario's `format`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// RNG seed; overrides the scenario's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Leave the generation time out of table and JSON output.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Metric functions, redshift ratio, deformation δ and proper-time ratio.
    Redshift,
    /// Received packet and mode overlap for each probe frequency.
    Overlap,
    /// Relative-error bounds on x, r_s and L.
    Bounds,
    /// Fisher matrix over (r_s, L) under both central-matrix modes.
    FisherMatrix,
    /// Sweep one scenario parameter and tabulate the bounds.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Spacing::Linear)]
        spacing: Spacing,
    },
    /// Monte Carlo check of the estimator against the quantum Cramér-Rao bound.
    Validate {
        /// Number of independent experiments; at least 100.
        #[arg(long)]
        replicas: Option<usize>,
    },
    /// Compare computed values against the quoted reproduction numbers.
    ReproducePaper,
}

fn load(cli: &Cli) -> Result<Scenario, CliError> {
    let mut s = match locate(cli.scenario.as_deref(), cli.scenario_dir.as_deref()) {
        Some(path) => Scenario::load(&path)?,
        None => Scenario::reproduction(PacketPreset::StateOfTheArt400THz, SchemeKind::SingleModeSqueezed),
    };
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<(Report, Format, Option<CliError>), CliError> {
    if let Command::ReproducePaper = cli.command {
        return Ok((commands::reproduce()?, cli.format.unwrap_or(Format::Table), None));
    }
    let scenario = load(cli)?;
    let format = cli.format.or(scenario.format).unwrap_or(Format::Table);
    let res = scenario.resolve()?;
    let report = match &cli.command {
        Command::Redshift => commands::redshift(&res)?,
        Command::Overlap => commands::overlap(&res)?,
        Command::Bounds => commands::bounds(&res)?,
        Command::FisherMatrix => commands::fisher(&res)?,
        Command::Sweep {
            axis,
            from,
            to,
            steps,
            spacing,
        } => commands::sweep(&res, *axis, &commands::grid(*from, *to, *steps, *spacing)?)?,
        Command::Validate { replicas } => {
            let (report, trial) = commands::validate(&res, replicas.unwrap_or(res.estimator.replicas))?;
            let violation = trial.violation.map(CliError::CrbViolation);
            return Ok((report, format, violation));
        }
        Command::ReproducePaper => unreachable!("handled above"),
    };
    Ok((report, format, None))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let timestamp = (!cli.no_timestamp).then(|| {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    });
    match run(&cli) {
        Ok((report, format, failure)) => {
            print!("{}", report.render(format, timestamp));
            match failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
