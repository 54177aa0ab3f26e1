use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tiltgap::generate::{generate, GenerateOptions};
use tiltgap::scenario::Scenario;

/// Verify closed-form expectation-gap identities on scenario files.
#[derive(Parser)]
#[command(name = "tiltgap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a scenario; exit 0 if all pass, 1 if any fail, 2 on bad input.
    Verify {
        file: PathBuf,
        /// Absolute tolerance on |direct - closed_form| (default 1e-10, or 1e-6 on grids).
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Include wall time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Write randomized scenarios whose checks must all pass.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::Verify {
            file,
            tolerance,
            format,
            timing,
        } => {
            if let Some(t) = tolerance {
                if !(t >= 0.0 && t.is_finite()) {
                    eprintln!("error: tolerance must be a finite non-negative number");
                    return ExitCode::from(2);
                }
            }
            let scenario = match Scenario::load(&file) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let report = scenario.run(tolerance);
            let rendered = match format {
                Format::Text => report.render_text(timing),
                Format::Json => report.render_json(timing),
            };
            print!("{rendered}");
            ExitCode::from(if report.all_passed() { 0 } else { 1 })
        }
        Command::Generate {
            seed,
            nx,
            ny,
            count,
            out,
        } => match generate(GenerateOptions { seed, nx, ny, count }, &out) {
            Ok(paths) => {
                for p in paths {
                    println!("{}", p.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {}: {e}", out.display());
                ExitCode::from(2)
            }
        },
    }
}
