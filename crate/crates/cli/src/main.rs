use std::process::ExitCode;

use clap::Parser;
use cohomkit_cli::{configure_threads, execute, report, Cli};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(report::kind_exit_code(report::error_kind(&e)) as u8);
    }
    let report = execute(&cli, argv[1..].to_vec());
    if cli.json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if let Some(e) = &report.error {
        eprintln!("error: {}", e.message);
    }
    ExitCode::from(report.exit_code() as u8)
}
