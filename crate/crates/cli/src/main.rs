mod args;
mod commands;
mod emit;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            Cli::command()
                .error(clap::error::ErrorKind::ValueValidation, "--threads must be at least 1")
                .exit();
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("thread pool is configured once");
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{}", failure.diagnostic());
            ExitCode::from(1)
        }
    }
}
