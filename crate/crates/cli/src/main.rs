mod args;
mod commands;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Context;
use covertq::error::Error;
use covertq::operator::Tolerances;
use output::{strip_out, RunManifest};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Input(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl CliError {
    /// 2 input, 3 budget, 4 assumption violation.
    fn exit_code(&self) -> u8 {
        match self {
            Self::Core(Error::BudgetExceeded { .. }) => 3,
            Self::Core(Error::AssumptionViolation(_) | Error::TrivialTest) => 4,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Core(e) => write!(f, "{e}"),
            Self::Input(s) | Self::Io(s) => f.write_str(s),
        }
    }
}

fn run(cli: Cli, raw: &[OsString]) -> Result<(), CliError> {
    let ctx = Context {
        args: strip_out(raw),
        tol: Tolerances::default(),
    };
    match &cli.command {
        Command::Capacity(a) => commands::capacity(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Egdemo(a) => commands::egdemo(&ctx, a),
        Command::Validate(a) => commands::validate(&ctx, a),
        Command::Replay(a) => replay(a),
    }
}

fn replay(a: &args::ReplayArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.manifest).map_err(|e| CliError::Input(format!("{}: {e}", a.manifest.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| CliError::Input(e.to_string()))?;
    let mut raw: Vec<OsString> = manifest.args.iter().map(OsString::from).collect();
    if let Some(out) = a.out.as_ref().or(manifest.output_path.as_ref()) {
        raw.push("--out".into());
        raw.push(out.into());
    }
    let cli = Cli::try_parse_from(std::iter::once(OsString::from("covertq")).chain(raw.iter().cloned()))
        .map_err(|e| CliError::Input(e.to_string()))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Input("a manifest cannot record a replay".into()));
    }
    run(cli, &raw)
}

fn main() -> ExitCode {
    let raw: Vec<OsString> = std::env::args_os().skip(1).collect();
    let cli = Cli::parse();
    match run(cli, &raw) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
