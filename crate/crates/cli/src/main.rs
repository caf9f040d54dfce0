mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use cylsep::Error;

use args::{Cli, Command};
use commands::{Ctx, RunConfig};

/// 0 pass, 1 fail, 2 indeterminate, 3 parse or schema error, 64 usage.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Schema(_) => 3,
        Error::BudgetExceeded { .. } => 2,
        Error::InvalidInput(_) | Error::Domain(_) | Error::DimensionMismatch(..) | Error::UnknownLabel(_) | Error::Io(_) => 64,
        _ => 1,
    }
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(t) = cli.threads.or(cfg.threads) {
        if t == 0 {
            return Err(Error::InvalidInput("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    let ctx = Ctx { budget: cli.budget.or(cfg.budget), cfg };
    match &cli.cmd {
        Command::Delta(a) => commands::delta(a, &ctx),
        Command::Overlap(a) => commands::overlap(a, &ctx),
        Command::EnumH(a) => commands::enum_h(a, &ctx),
        Command::Dims(a) => commands::dims(a, &ctx),
        Command::Construct(a) => commands::construct(a, &ctx),
        Command::Verify(a) => commands::verify_cmd(a, &ctx),
        Command::Oracle(a) => commands::oracle(a, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
