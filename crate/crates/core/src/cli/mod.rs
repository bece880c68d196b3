//! The `wgswitch` command line.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 sweep finished with some failed points.

pub mod commands;
pub mod config;
pub mod grid;
pub mod output;

use std::ffi::OsString;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commands::{CommandError, Exec};
use config::{CommonArgs, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "wgswitch",
    version,
    about = "Light switching between coupled waveguides with a flipped phase mismatch"
)]
pub struct Cli {
    /// Report errors on stderr as a JSON object
    #[arg(long, global = true)]
    pub error_json: bool,
    /// Evaluate grid points on the calling thread only
    #[arg(long, global = true)]
    pub serial: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-guide trajectory as CSV
    Run(CommonArgs),
    /// Final intensity in guide 2 over an (Ω₀L, Δ₀L) grid
    Sweep(CommonArgs),
    /// Several engines over the same grid, with a JSON summary
    Compare(CompareArgs),
    /// Three-guide splitter trajectory as CSV
    Splitter(SplitterArgs),
    /// Adiabaticity margin next to the universal prediction and the integration
    CheckAdiabatic(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Where to write the summary JSON (stderr when absent)
    #[arg(long)]
    pub summary: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitterArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Inject the dark state (1, 0, −1)/√2 instead of the middle guide
    #[arg(long)]
    pub dark: bool,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
    Partial { failed: usize, total: usize },
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Partial { .. } => EXIT_PARTIAL,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Config(_) => "config",
            Failure::Numerical(_) => "numerical",
            Failure::Partial { .. } => "partial",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(m) | Failure::Numerical(m) => m.clone(),
            Failure::Partial { failed, total } => {
                format!("{failed} of {total} grid evaluations failed and were written as NaN")
            }
        }
    }
}

impl From<CommandError> for Failure {
    fn from(e: CommandError) -> Self {
        match e {
            CommandError::Config(m) => Failure::Config(m),
            CommandError::Numerical(m) => Failure::Numerical(m),
        }
    }
}

fn write(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    output::emit(path, text).map_err(|e| match path {
        Some(p) => Failure::Config(format!("cannot write {}: {e}", p.display())),
        None => Failure::Config(format!("cannot write to stdout: {e}")),
    })
}

fn exec(serial: bool) -> Result<Exec, Failure> {
    Ok(Exec {
        serial,
        threads: grid::thread_cap().map_err(Failure::Config)?,
    })
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run(args) => {
            let cfg = RunConfig::resolve(args).map_err(Failure::Config)?;
            let csv = commands::cmd_run(&cfg)?;
            write(cfg.out.as_deref(), &csv)
        }
        Command::Sweep(args) => {
            let cfg = RunConfig::resolve(args).map_err(Failure::Config)?;
            let exec = exec(cli.serial)?;
            let (csv, failed) = commands::cmd_sweep(&cfg, exec)?;
            write(cfg.out.as_deref(), &csv)?;
            partial(failed, cfg.nx * cfg.ny)
        }
        Command::Compare(args) => {
            let cfg = RunConfig::resolve(&args.common).map_err(Failure::Config)?;
            cfg.validate_compare().map_err(Failure::Config)?;
            let exec = exec(cli.serial)?;
            let (csv, summary) = commands::cmd_compare(&cfg, exec)?;
            write(cfg.out.as_deref(), &csv)?;
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
            match &args.summary {
                Some(path) => write(Some(path), &text)?,
                None => eprint!("{text}"),
            }
            partial(summary.failures, cfg.nx * cfg.ny * cfg.engines.len())
        }
        Command::Splitter(args) => {
            let cfg = RunConfig::resolve(&args.common).map_err(Failure::Config)?;
            let (csv, [i1, i2, i3]) = commands::cmd_splitter(&cfg, args.dark)?;
            write(cfg.out.as_deref(), &csv)?;
            eprintln!(
                "final I1={} I2={} I3={}",
                output::num(i1),
                output::num(i2),
                output::num(i3)
            );
            Ok(())
        }
        Command::CheckAdiabatic(args) => {
            let cfg = RunConfig::resolve(args).map_err(Failure::Config)?;
            let report = commands::cmd_check_adiabatic(&cfg)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            write(cfg.out.as_deref(), &text)
        }
    }
}

fn partial(failed: usize, total: usize) -> Result<(), Failure> {
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Partial { failed, total })
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            if cli.error_json {
                let body = json!({
                    "error": {
                        "kind": failure.kind(),
                        "exit_code": failure.code(),
                        "message": failure.message(),
                    }
                });
                eprintln!("{body}");
            } else {
                eprintln!("wgswitch: {}", failure.message());
            }
            failure.code()
        }
    }
}
