use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use clap::Parser;

use peano::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((outcome, cfg)) => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{}", outcome.render(cfg.output_format)) {
                Err(e) if e.kind() != ErrorKind::BrokenPipe => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
                _ => ExitCode::from(outcome.exit_code() as u8),
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
