mod commands;
mod config;
mod error;

use clap::{Parser, Subcommand};
use hoibc::impedance::FitMethod;
use std::path::PathBuf;
use std::process::ExitCode;

use config::{Overrides, PolSelection};
use error::CliError;

#[derive(Parser)]
#[command(name = "hoibc", version, about = "2D scattering from coated bodies with impedance boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (default: the config's output_dir, else the current directory).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["te", "tm", "both"])]
    pol: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
    ibc: Option<u8>,
    #[arg(long, value_parser = commands::parse_fit)]
    fit: Option<FitMethod>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and fitted impedances over incidence angle.
    ImpedanceTable(Common),
    /// Uniqueness and well-posedness clauses of the coefficients.
    Check(Common),
    /// Solve the boundary-element problem and write echo width and currents.
    Solve(Common),
    /// Modal-series echo width of the coated circular cylinder.
    Oracle(Common),
    /// Compare two echo-width CSV files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_name = "DB")]
        threshold: f64,
    },
}

fn load(c: &Common) -> Result<(config::RunConfig, PathBuf), CliError> {
    let pol = c.pol.as_deref().map(|p| match p {
        "te" => PolSelection::Te,
        "tm" => PolSelection::Tm,
        _ => PolSelection::Both,
    });
    let cfg = config::load(&c.config, &Overrides { pol, order: c.ibc, fit: c.fit })?;
    let out = c.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    Ok((cfg, out))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let quiet = cli.quiet;
    match &cli.command {
        Command::ImpedanceTable(c) => {
            let (cfg, out) = load(c)?;
            commands::impedance_table_cmd(&cfg, &out)?.commit(quiet)
        }
        Command::Check(c) => {
            let (cfg, _) = load(c)?;
            let (text, outputs) = commands::check_cmd(&cfg, c.out.as_deref())?;
            outputs.commit(true)?;
            print!("{text}");
            Ok(())
        }
        Command::Solve(c) => {
            let (cfg, out) = load(c)?;
            commands::solve_cmd(&cfg, &out)?.commit(quiet)
        }
        Command::Oracle(c) => {
            let (cfg, out) = load(c)?;
            commands::oracle_cmd(&cfg, &out)?.commit(quiet)
        }
        Command::Compare { a, b, threshold } => {
            let (text, pass) = commands::compare_cmd(a, b, *threshold)?;
            print!("{text}");
            if pass {
                Ok(())
            } else {
                Err(CliError::ComparisonFailed(format!("{} vs {} exceeds {threshold} dB", a.display(), b.display())))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

