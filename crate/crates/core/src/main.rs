use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use collabnet::cli::{self, Cli, Command, RunConfig, EXIT_ERROR};
use collabnet::discogs::{HttpTransport, SystemClock};

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Fetch(args) => {
            let mut transport = HttpTransport::default();
            let report = cli::run_fetch(&args, &mut transport, &SystemClock::default())?;
            for f in &report.failures {
                eprintln!("failed {}: {}", f.id, f.reason);
            }
            Ok(cli::fetch_exit_code(&report))
        }
        Command::Roles(args) => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            cli::run_roles(&args.input, args.format.into(), &mut lock)?;
            lock.flush()?;
            Ok(0)
        }
        Command::Analyze(args) => {
            cli::run_analyze(&RunConfig::from(&args))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
