//! `rolemark`: role detection, augmentation, noise transforms, evaluation
//! suites and name-prediction scoring over Java method corpora.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 for data errors.

mod args;
mod commands;

use args::{Cli, Command};
use clap::error::ErrorKind;
use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("{} (see --help)", one_line(&e.render().to_string()));
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Detect(a) => commands::detect(a),
        Command::Augment(a) => commands::augment(a),
        Command::Transform(a) => commands::transform(a),
        Command::Filter(a) => commands::filter(a),
        Command::Suite(a) => commands::suite(a),
        Command::Stats(a) => commands::stats_cmd(a),
        Command::Eval(a) => commands::eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// The message part of a clap error on one line, without the usage block.
fn one_line(rendered: &str) -> String {
    let message = rendered.split("\n\n").next().unwrap_or(rendered);
    message.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ")
}
