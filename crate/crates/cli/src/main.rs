//! `relweyl`: runs one experiment and writes its report as CSV or JSON.
//!
//! Exit codes: 0 success, 2 configuration error, 3 inadmissible parameters,
//! 4 numerical failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use relweyl::lab::{run_experiment, ExperimentConfig, ExperimentKind, Format};
use relweyl::Error;

#[derive(Debug, Parser)]
#[command(
    name = "relweyl",
    version,
    about = "Relative Weyl asymptotics laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration; missing sections take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory receiving `<experiment>.<ext>`; standard output if absent.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Worker threads; the output does not depend on this.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Seed for randomised experiments, overriding the configuration.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Error exponents, localisation parameters and the zone ledger.
    Exponents,
    /// Negative-eigenvalue trace over an h ladder.
    TraceNeg,
    /// Classical phase-space integral.
    Classical,
    /// Trace minus classical term over an h ladder.
    Weyl,
    /// Relative trace difference against the relative classical term.
    Relative,
    /// Ground-state energy scaling for pure power potentials.
    GseScaling,
    /// Partition-of-unity identity, local finiteness and gradient bounds.
    ImsCheck,
    /// Convergence rates of coherent-state mollification.
    MollifySlopes,
}

impl From<Command> for ExperimentKind {
    fn from(c: Command) -> Self {
        match c {
            Command::Exponents => ExperimentKind::Exponents,
            Command::TraceNeg => ExperimentKind::TraceNeg,
            Command::Classical => ExperimentKind::Classical,
            Command::Weyl => ExperimentKind::Weyl,
            Command::Relative => ExperimentKind::Relative,
            Command::GseScaling => ExperimentKind::GseScaling,
            Command::ImsCheck => ExperimentKind::ImsCheck,
            Command::MollifySlopes => ExperimentKind::MollifySlopes,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

fn execute(cli: &Cli) -> relweyl::Result<()> {
    let kind = ExperimentKind::from(cli.command);
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let report = run_experiment(kind, &config, cli.threads)?;
    let format = Format::from(cli.format);
    match &cli.out {
        Some(dir) => {
            let path = report.write(dir, format)?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let text = report.encode(format)?;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
        }
    }
    for check in &report.checks {
        eprintln!("{check}");
    }
    report.outcome()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
