use std::process::ExitCode;

use clap::Parser;
use magsym_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("magsym: {e}");
            return ExitCode::from(2);
        }
    };
    if !cli.quiet {
        print!("{}", report.render());
    }
    if let Some(path) = &cli.json {
        let doc = report.to_json();
        if path.as_os_str() == "-" {
            println!("{doc}");
        } else if let Err(e) = std::fs::write(path, doc + "\n") {
            eprintln!("magsym: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_status as u8)
}
