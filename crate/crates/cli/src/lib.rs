//! Command-line front end for `hodgeq-core`.

pub mod commands;
pub mod config;
pub mod io;
pub mod verify;

pub use commands::{cmd_estimate, cmd_qsim, cmd_rank, cmd_verify, EXIT_CHECK_FAILED, EXIT_ERROR, EXIT_OK};
pub use config::{Cli, Command, CommandArgs, RunConfig};

/// Parses `args` (program name first) and runs the chosen subcommand.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let (command, flags) = match cli.command {
        CommandArgs::Rank(f) => (Command::Rank, f),
        CommandArgs::Qsim(f) => (Command::Qsim, f),
        CommandArgs::Estimate(f) => (Command::Estimate, f),
        CommandArgs::Verify(f) => (Command::Verify, f),
    };
    let cfg = match RunConfig::resolve(command, flags) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_ERROR;
        }
    };
    match command {
        Command::Rank => cmd_rank(&cfg),
        Command::Qsim => cmd_qsim(&cfg),
        Command::Estimate => cmd_estimate(&cfg),
        Command::Verify => cmd_verify(&cfg),
    }
}
