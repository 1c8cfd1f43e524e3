mod cli;
mod commands;
mod data;
mod run;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use run::{Failure, Outcome, Run};

const THREADS_ENV: &str = "GRENBOOT_THREADS";

fn configure_threads(flag: Option<usize>) -> Outcome<()> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            return run::usage("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Runtime(e.into()))?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Outcome<()> {
    configure_threads(cli.threads)?;
    let cmd = &cli.command;
    let mut run = Run::new(cmd.out())?;
    match cmd {
        Command::Gen(a) => commands::gen(a, &mut run)?,
        Command::Fit(a) => commands::fit(a, &mut run)?,
        Command::Ci(a) => commands::ci(a, &mut run)?,
        Command::Band(a) => commands::band(a, &mut run)?,
        Command::Limits(a) => commands::limits(a, &mut run)?,
        Command::Experiment(e) => commands::experiment(e, &mut run)?,
    }
    run.finish(cmd.name(), cmd, cmd.seed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("grenboot: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
