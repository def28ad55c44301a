use std::process::ExitCode;

use clap::Parser;
use statewit_cli::cli::{Cli, Command};
use statewit_cli::{bench, commands, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => commands::cmd_gen(a),
        Command::Analyze(a) => commands::cmd_analyze(a),
        Command::Witness(a) => commands::cmd_witness(a),
        Command::Bench(a) => bench::cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("statewit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
