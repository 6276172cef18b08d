//! Batch front-end for the spinning-particle simulator: scenario runs with
//! trajectory export, the cross-module verification suite, and parameter
//! scans.
//!
//! Exit codes: 0 success, 1 check failure, 2 configuration error, 3 runtime
//! error.

mod config;
mod output;
mod run;
mod scan;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit 2).
    Config(String),
    /// A verification or audit check failed (exit 1).
    Check(String),
    /// Integration, numerical, or I/O failure (exit 3).
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Check(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "zitter",
    about = "Classical spinning-particle phase-space simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write the sample table plus an audit.
    Run {
        /// Scenario file (TOML).
        config: PathBuf,
        /// Directory for output files (created if missing).
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run the cross-module verification suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampled states per stochastic check (0 = empty report).
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Also write the audit to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one parameter and write a summary table.
    Scan {
        /// Scenario file (TOML).
        config: PathBuf,
        /// One of: lambda, mix-weight, field-strength.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Output file for the summary table.
        #[arg(long, default_value = "scan.csv")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, out_dir } => run_command(&config, &out_dir),
        Command::Verify { seed, cases, out } => verify_command(seed, cases, out.as_deref()),
        Command::Scan {
            config,
            param,
            from,
            to,
            steps,
            out,
        } => scan_command(&config, &param, from, to, steps, &out),
    }
}

fn read_config(path: &Path) -> Result<(String, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let hash = config::config_hash(&text);
    Ok((text, hash))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn run_command(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let (text, hash) = read_config(config_path)?;
    let parsed = config::parse(&text)?;
    let scenario = config::build(parsed)?;
    let artifacts = run::execute(&scenario, &hash)?;

    let samples_path = out_dir.join(&scenario.config.output.samples);
    let audit_path = out_dir.join(&scenario.config.output.audit);
    write_file(&samples_path, &artifacts.table)?;
    write_file(&audit_path, &artifacts.audit.render())?;

    println!("samples: {}", samples_path.display());
    println!("audit:   {}", audit_path.display());
    if !artifacts.audit.pass() {
        return Err(CliError::Check("audit reported failing checks".into()));
    }
    Ok(())
}

fn verify_command(seed: u64, cases: usize, out: Option<&Path>) -> Result<(), CliError> {
    let audit = verify::execute(seed, cases)?;
    let rendered = audit.render();
    print!("{rendered}");
    if let Some(path) = out {
        write_file(path, &rendered)?;
    }
    if !audit.pass() {
        return Err(CliError::Check("verification suite failed".into()));
    }
    Ok(())
}

fn scan_command(
    config_path: &Path,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
    out: &Path,
) -> Result<(), CliError> {
    let (text, hash) = read_config(config_path)?;
    let parsed = config::parse(&text)?;
    let parameter = scan::ScanParameter::parse(param)?;
    let rows = scan::execute(&parsed, parameter, from, to, steps)?;
    let rendered = scan::render(&rows, &hash, parameter);
    write_file(out, &rendered)?;
    println!("scan:    {}", out.display());
    Ok(())
}
