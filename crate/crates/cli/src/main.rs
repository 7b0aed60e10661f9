mod args;
mod commands;
mod output;
mod scenario;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use scenario::Scenario;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Output(String),
}

impl From<coopgame::Error> for Failure {
    fn from(e: coopgame::Error) -> Self {
        match e {
            coopgame::Error::Output(msg) => Failure::Output(msg),
            e if e.is_numerical() => Failure::Numerical(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Numerical(_) => 2,
            Failure::Input(_) | Failure::Output(_) => 1,
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let opts = &cli.opts;
    if let Command::Figure { which } = &cli.command {
        let (base, _, _) = commands::figure_base(which);
        let resolved = Scenario::resolve(base, opts)?;
        let out = commands::figure(resolved, which)?;
        return match &opts.out {
            Some(dir) => {
                for name in output::emit_dir(&out, dir)? {
                    eprintln!("wrote {}", dir.join(name).display());
                }
                Ok(())
            }
            None => output::emit(&out, opts.format, None),
        };
    }

    let s = Scenario::resolve(Scenario::default(), opts)?.scenario;
    let out = match &cli.command {
        Command::Classify => commands::classify(s)?,
        Command::Decompose => commands::decompose(s)?,
        Command::Threshold { curve } => commands::threshold(s, *curve)?,
        Command::Equilibrium => commands::equilibrium(s)?,
        Command::Phase => commands::phase(s)?,
        Command::Simulate => commands::simulate(s)?,
        Command::Abm { action } => commands::abm(s, *action)?,
        Command::Match { player1, player2 } => commands::play(s, player1, player2)?,
        Command::Figure { .. } => unreachable!("handled above"),
    };
    output::emit(&out, opts.format, opts.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
