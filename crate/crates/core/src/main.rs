use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use epr_transport::scenario::{emit_report, parse_scenario, run_scenario, Format};
use epr_transport::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_STRICT: u8 = 3;

#[derive(Parser)]
#[command(
    version,
    about = "Spin correlations of particle pairs along curved-spacetime geodesics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and emit its report.
    Run {
        scenario: PathBuf,
        /// Exit with status 3 if any diagnostic exceeds its tolerance.
        #[arg(long)]
        strict: bool,
        /// Overrides the format given in the scenario.
        #[arg(long, value_parser = ["table", "csv"])]
        format: Option<String>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        scenario,
        strict,
        format,
        out,
    } = Cli::parse().command;

    let text = match fs::read_to_string(&scenario) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", scenario.display());
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let s = match parse_scenario(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", scenario.display());
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let report = match run_scenario(&s) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Usage(_) | Error::Configuration(_) => EXIT_VALIDATION,
                _ => EXIT_NUMERICAL,
            };
            return ExitCode::from(code);
        }
    };

    let format = match format.as_deref() {
        Some(f) => f.parse().unwrap_or(Format::Table),
        None => s.format,
    };
    let body = emit_report(&report, format);
    let target = out.or_else(|| s.output_path.as_ref().map(PathBuf::from));
    match target {
        Some(path) => {
            if let Err(e) = fs::write(&path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_NUMERICAL);
            }
        }
        None => print!("{body}"),
    }

    if let Some(f) = &report.failure {
        eprintln!("numerical failure: {f}");
        return ExitCode::from(EXIT_NUMERICAL);
    }
    if strict && !report.diagnostics_ok() {
        eprintln!("strict: diagnostics exceed their tolerances");
        return ExitCode::from(EXIT_STRICT);
    }
    ExitCode::SUCCESS
}
