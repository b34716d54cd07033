//! `extreme-fpt`: rescalings, moments, densities, error tables, Monte Carlo
//! runs and regime checks for extreme first passage times, written as CSV.

mod commands;
mod config;
mod format;

use std::fmt;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Flags, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "extreme-fpt", version, about = "Extreme first passage time statistics via Gumbel limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalizing constants (a_N, b_N) for each N and variant
    Rescale(Flags),
    /// Approximate and exact mean and variance of T_(k,N)
    Stats(Flags),
    /// Density of (T_N - b_N)/a_N next to the Gumbel density on [-6, 6]
    Density(Flags),
    /// Relative errors of the three mean approximations across N
    ErrorTable(Flags),
    /// Monte Carlo draws of the k fastest of N times
    Sample(Flags),
    /// Whether N is large enough for the asymptotics to apply
    Regime(Flags),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rescale(_) => "rescale",
            Command::Stats(_) => "stats",
            Command::Density(_) => "density",
            Command::ErrorTable(_) => "error-table",
            Command::Sample(_) => "sample",
            Command::Regime(_) => "regime",
        }
    }

    fn flags(&self) -> &Flags {
        match self {
            Command::Rescale(f)
            | Command::Stats(f)
            | Command::Density(f)
            | Command::ErrorTable(f)
            | Command::Sample(f)
            | Command::Regime(f) => f,
        }
    }
}

/// Failure of one invocation, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration (exit 2).
    Usage(String),
    /// The computation itself failed (exit 3).
    Compute(extreme_fpt::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<extreme_fpt::Error> for CliError {
    fn from(e: extreme_fpt::Error) -> Self {
        CliError::Compute(e)
    }
}

fn run(cli: &Cli, invocation: &str) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(cli.command.flags())?;
    let mut out = String::new();
    let is_csv = !matches!(cli.command, Command::Regime(_));
    if is_csv {
        out.push_str(&format!(
            "# extreme-fpt {} {} {invocation}\n",
            env!("CARGO_PKG_VERSION"),
            cli.command.name()
        ));
    }
    match &cli.command {
        Command::Rescale(_) => commands::rescale(&cfg, &mut out),
        Command::Stats(_) => commands::stats(&cfg, &mut out),
        Command::Density(_) => commands::density(&cfg, &mut out),
        Command::ErrorTable(_) => commands::error_table_cmd(&cfg, &mut out),
        Command::Sample(_) => commands::sample(&cfg, &mut out),
        Command::Regime(_) => commands::regime(&cfg, &mut out),
    }?;
    match &cfg.output {
        Some(path) => std::fs::write(path, out)
            .map_err(|e| CliError::usage(format!("output: cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::usage(format!("output: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let invocation = args.iter().skip(2).cloned().collect::<Vec<_>>().join(" ");
    match run(&cli, &invocation) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("extreme-fpt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
