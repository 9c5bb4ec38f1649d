use std::process::ExitCode;

use clap::Parser;

use blendvis_service::cli::{replay, serve, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let result = if args.serve { serve(&args) } else { replay(&args).map(|_| ()) };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
