use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use coldwave::cli::{self, parse_config_file, Subcommand};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Simulate,
    Ensemble,
    Period,
    Wave,
    Floquet,
    Criteria,
    Crosscheck,
    BreakingMap,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Simulate => Subcommand::Simulate,
            Command::Ensemble => Subcommand::Ensemble,
            Command::Period => Subcommand::Period,
            Command::Wave => Subcommand::Wave,
            Command::Floquet => Subcommand::Floquet,
            Command::Criteria => Subcommand::Criteria,
            Command::Crosscheck => Subcommand::Crosscheck,
            Command::BreakingMap => Subcommand::BreakingMap,
        }
    }
}

/// Cold-plasma upper-hybrid oscillation experiments.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Key = value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Lagrangian coordinate of the characteristic used by single-orbit commands.
    #[arg(long)]
    seed_rho: Option<f64>,
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let quiet = args.quiet;
    let result = parse_config_file(&args.config).and_then(|mut cfg| {
        if let Some(rho) = args.seed_rho {
            cfg.run.seed_rho = rho;
            cfg.resolved.insert("run.seed_rho".into(), rho.to_string());
        }
        cli::run(args.command.into(), &cfg, &args.out, &mut |msg| {
            if !quiet {
                eprintln!("{msg}");
            }
        })
    });
    match result {
        Ok(outcome) => {
            if !quiet {
                print!("{}", outcome.summary.render());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
