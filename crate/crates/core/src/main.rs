use std::process::ExitCode;

use profinite::cli::{execute, parse_command_or_exit, usage_report};

fn main() -> ExitCode {
    let report = match parse_command_or_exit(std::env::args_os().skip(1)) {
        Ok(cmd) => execute(&cmd),
        Err(e) => usage_report(&e),
    };
    print!("{}", report.body());
    if let Some(e) = &report.error {
        eprintln!("{e}");
    }
    eprintln!("{}", report.timing_line());
    ExitCode::from(report.status as u8)
}
