use std::process::ExitCode;

use clap::Parser;
use qforge_cli::{apply_precision_env, execute, Cli, Format};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let report = match apply_precision_env().and_then(|()| execute(&cli, command)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qforge: {e}");
            return ExitCode::from(2);
        }
    };
    let body = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("qforge: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
