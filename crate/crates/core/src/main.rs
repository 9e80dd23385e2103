use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harmavg::cli::{self, RunConfig, Suite};

#[derive(Parser)]
#[command(
    name = "harmavg",
    version,
    about = "Harmonic extension by iterated ball averaging"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate to a fixed point and write the configured outputs.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
    /// Run one invariant suite: lemma1, eq8, barrier, hull or fixedpoint.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        suite: String,
        #[arg(long)]
        quiet: bool,
    },
    /// Solve once per value of `resolution=..`, `c=..` or `samples=..`.
    Study {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sweep: String,
        #[arg(long)]
        quiet: bool,
    },
}

fn execute(command: Command) -> harmavg::Result<u8> {
    match command {
        Command::Solve { config, quiet } => cli::cmd_solve(&RunConfig::load(&config)?, quiet),
        Command::Verify {
            config,
            suite,
            quiet,
        } => {
            let suite: Suite = suite.parse()?;
            cli::cmd_verify(&RunConfig::load(&config)?, suite, quiet)
        }
        Command::Study {
            config,
            sweep,
            quiet,
        } => cli::cmd_study(&RunConfig::load(&config)?, &sweep, quiet),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(cli::EXIT_CONFIG);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match execute(args.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::EXIT_CONFIG)
        }
    }
}
