use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fdesc_cli::{scenario, Failure, Scenario};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "fdesc",
    version,
    about = "Fermionic descriptor simulator and theorem checker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print its report
    Simulate {
        /// Scenario JSON, or `-` for stdin
        scenario: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Randomized sweep over every checker
    Verify {
        #[arg(long, default_value_t = 3)]
        modes: usize,
        /// Base seeds, one sweep each
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        /// Random instances per checker and seed
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Recover the unitary from a descriptor set or a simulate report
    Reconstruct {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the scenario and report schemas
    Schema,
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let io = |e: std::io::Error| Failure::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(io)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Simulate {
            scenario: path,
            output,
        } => {
            let scn = Scenario::from_json(&read_input(&path)?)?;
            let report = fdesc_cli::run_scenario(&scn)?;
            emit(&report, output.as_deref())?;
            Ok(report.passed)
        }
        Command::Verify {
            modes,
            seeds,
            count,
            output,
        } => {
            let report = fdesc_cli::run_verify(modes, &seeds, count, scenario::mode_cap()?)?;
            emit(&report, output.as_deref())?;
            Ok(report.passed)
        }
        Command::Reconstruct { input, output } => {
            let d = fdesc_cli::parse_descriptor_input(&read_input(&input)?)?;
            let result = fdesc_cli::run_reconstruct(&d)?;
            emit(&result, output.as_deref())?;
            Ok(result.passed)
        }
        Command::Schema => {
            print!("{}", fdesc_cli::SCHEMA_DOCUMENT);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("fdesc: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("fdesc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
