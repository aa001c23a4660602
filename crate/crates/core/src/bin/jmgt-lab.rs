use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jmgt_lab::config::parse_config;
use jmgt_lab::experiment::{run, Command};

#[derive(Parser)]
#[command(
    name = "jmgt-lab",
    version,
    about = "Spectral-Galerkin experiments for third-order nonlinear acoustics"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Common {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to the config's `output`, then `./out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Only report errors.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Sub {
    /// Linear third-order solve with unit coefficient.
    SolveLinear(Common),
    /// Nonlinear third-order solve, fixed-point iteration.
    SolveJmgt(Common),
    /// Third-order solve with the clamped coefficient.
    SolveRelaxed(Common),
    /// Nonlinear second-order reference solve.
    SolveWestervelt(Common),
    /// Third-order runs over `tau_sweep` against the second-order reference.
    LimitStudy(Common),
    /// Energy estimate audit over `tau_sweep`.
    EnergyAudit(Common),
    /// Manufactured-solution convergence table.
    Mms(Common),
}

impl Sub {
    fn split(self) -> (Command, Common) {
        match self {
            Sub::SolveLinear(c) => (Command::SolveLinear, c),
            Sub::SolveJmgt(c) => (Command::SolveJmgt, c),
            Sub::SolveRelaxed(c) => (Command::SolveRelaxed, c),
            Sub::SolveWestervelt(c) => (Command::SolveWestervelt, c),
            Sub::LimitStudy(c) => (Command::LimitStudy, c),
            Sub::EnergyAudit(c) => (Command::EnergyAudit, c),
            Sub::Mms(c) => (Command::Mms, c),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, common) = cli.command.split();
    let level = if common.quiet {
        log::LevelFilter::Error
    } else {
        log::LevelFilter::Info
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();

    let parsed = match parse_config(&common.config) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    let out = common
        .out
        .or_else(|| parsed.config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    log::info!("{command}: writing to {}", out.display());
    match run(command, &parsed.config, &out) {
        Ok(()) => {
            log::info!("{command}: done");
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
