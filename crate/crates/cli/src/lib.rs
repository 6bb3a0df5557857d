//! Command-line front end: argument handling, report assembly and output formats.

pub mod args;
pub mod commands;
pub mod json;
pub mod svg;

use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

use args::{config_args, find_config, Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("initial condition lies on the forbidden set: y vanishes at step {witness} (witness n={witness})")]
    Forbidden { witness: usize },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Degenerate(_) => 2,
            CliError::Usage(_) => 3,
            CliError::Forbidden { .. } => 4,
        }
    }
}

const SUBCOMMANDS: [&str; 5] = ["classify", "simulate", "forbidden", "sweep", "portrait"];

enum Outcome {
    Text(String, Option<std::path::PathBuf>),
    Help(String),
}

fn first_line(s: &str) -> String {
    let line = s
        .lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("invalid arguments");
    line.trim_start_matches("error: ").to_string()
}

fn execute(args: &[String]) -> Result<Outcome, CliError> {
    let mut argv = args.to_vec();
    if let Some(path) = find_config(&argv) {
        let extra = config_args(&path)?;
        if let Some(i) = argv.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) {
            argv.splice(i + 1..i + 1, extra);
        }
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Ok(Outcome::Help(e.render().to_string()));
        }
        Err(e) => return Err(CliError::Usage(first_line(&e.render().to_string()))),
    };
    let (text, output) = match &cli.command {
        Command::Classify(c) => (commands::classify(c)?, c.output.clone()),
        Command::Simulate(c) => (commands::simulate(c)?, c.output.clone()),
        Command::Forbidden(c) => (commands::forbidden(c)?, c.output.clone()),
        Command::Sweep(a) => (commands::sweep(a)?, a.output.clone()),
        Command::Portrait(a) => (commands::portrait(a)?, a.common.output.clone()),
    };
    Ok(Outcome::Text(text, output))
}

/// Runs one invocation; `args[0]` is the program name. Returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32 {
    let result = execute(args).and_then(|o| match o {
        Outcome::Help(h) => out
            .write_all(h.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
        Outcome::Text(t, None) => out
            .write_all(t.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
        Outcome::Text(t, Some(path)) => std::fs::write(&path, t)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let prefix = if color {
                "\x1b[31merror\x1b[0m"
            } else {
                "error"
            };
            let _ = writeln!(err, "{prefix}: {e}");
            e.exit_code()
        }
    }
}

/// Captures standard output and standard error of one invocation.
pub fn run_captured(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("ratsys")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err, false);
    (
        code,
        String::from_utf8(out).expect("utf-8"),
        String::from_utf8(err).expect("utf-8"),
    )
}
