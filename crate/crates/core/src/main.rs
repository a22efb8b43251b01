use std::io;
use std::process::ExitCode;

use clap::Parser;
use romik::cli::{run, CliConfig};

fn main() -> ExitCode {
    let config = match CliConfig::try_parse() {
        Ok(config) => config,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(config, &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code as u8)
}
