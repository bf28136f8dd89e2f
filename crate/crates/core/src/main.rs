use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use abeltrace::cli::Cli;
use abeltrace::problem::to_text;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.run() {
        Ok(outcome) => {
            // a closed pipe is not an error of the computation
            let _ = writeln!(std::io::stdout(), "{}", to_text(&outcome.report));
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
