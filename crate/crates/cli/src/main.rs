mod cli;
mod commands;
mod inputs;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use commands::Ctx;
use inputs::{CliError, CliResult};

fn run(cli: &Cli) -> CliResult<()> {
    let ctx = Ctx {
        format: cli.format,
        quiet: cli.quiet,
    };
    let text = match &cli.command {
        Command::Degrees(a) => commands::degrees(a, &ctx)?,
        Command::Fit(a) => commands::fit(a, &ctx)?,
        Command::Joint(a) => commands::joint(a, &ctx)?,
        Command::Entropy(a) => commands::entropy(a, &ctx)?,
        Command::Distance(a) => commands::distance(a, &ctx)?,
        Command::Scan(a) => commands::scan(a, &ctx)?,
        Command::Calibrate(a) => commands::calibrate(a, &ctx)?,
        Command::Report(a) => commands::report(a, &ctx)?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Core(e.into())),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Core(e.into())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        // closed pipe, e.g. `| head`
        Err(CliError::Core(ownconc::Error::Io(e)))
            if e.kind() == std::io::ErrorKind::BrokenPipe =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
