use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pncmap_cli::output::write_report;
use pncmap_cli::spec::{BitmapSpec, Command, ExperimentSpec, MappingSpec, OutputFormat, PartialSpec, SnrGrid};
use pncmap_cli::{commands, CliError, Result};

/// Optimal relay symbol mappings and user bit mappings for two-way relaying
/// with physical-layer network coding over PAM.
#[derive(Parser, Debug)]
#[command(name = "pncmap", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Exhaustive search for the optimal mapping(s) at each SNR.
    Optimize(ExperimentArgs),
    /// Error rates of reference or given mappings over an SNR grid.
    Sweep(ExperimentArgs),
    /// Monte Carlo simulation of given mappings.
    Simulate(ExperimentArgs),
    /// Reference mappings, bit-error tables and search-space counts.
    Tables(ExperimentArgs),
}

#[derive(Args, Debug, Default)]
struct ExperimentArgs {
    /// TOML or JSON file with the same fields; flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// uniform4, nonuniform4, uniform8 or nonuniform8.
    #[arg(long)]
    scenario: Option<String>,
    /// ser or ber.
    #[arg(long)]
    criterion: Option<String>,
    /// Single SNR in dB.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "snr_range")]
    snr: Option<f64>,
    /// SNR grid in dB as start:stop:step.
    #[arg(long, value_name = "A:B:STEP", allow_hyphen_values = true)]
    snr_range: Option<SnrGrid>,
    /// Reference id (1, 2, ...) or broadcast points, e.g. -3,1,-1,3. Repeatable.
    #[arg(long, allow_hyphen_values = true)]
    mapping: Vec<MappingSpec>,
    /// gray, binary, third or bit labels per symbol, e.g. 00,01,11,10. Repeatable.
    #[arg(long)]
    bitmap: Vec<BitmapSpec>,
    /// Add Monte Carlo estimates to a sweep.
    #[arg(long)]
    simulate: bool,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Output file; standard output if absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Fail with exit code 3 instead of widening the search when the
    /// equivalence-class check fails.
    #[arg(long)]
    strict: bool,
}

impl ExperimentArgs {
    fn into_spec(self, command: Command) -> Result<ExperimentSpec> {
        let base = match &self.config {
            Some(path) => PartialSpec::from_file(path)?,
            None => PartialSpec::default(),
        };
        let flags = PartialSpec {
            scenario: self.scenario,
            criterion: self.criterion,
            snr: self.snr.map(SnrGrid::single).or(self.snr_range),
            mappings: (!self.mapping.is_empty()).then_some(self.mapping),
            bitmaps: (!self.bitmap.is_empty()).then_some(self.bitmap),
            simulate: self.simulate.then_some(true),
            trials: self.trials,
            seed: self.seed,
            format: self.format,
            out: self.out,
            strict: self.strict.then_some(true),
        };
        base.overlay(flags).resolve(command)
    }
}

fn emit<R: Serialize>(spec: &ExperimentSpec, records: &[R]) -> Result<()> {
    match &spec.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::field("out", format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_report(spec, records, &mut w)?;
            w.flush()?;
        }
        None => write_report(spec, records, io::stdout().lock())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let (command, args) = match cli.command {
        Sub::Optimize(a) => (Command::Optimize, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Tables(a) => (Command::Tables, a),
    };
    let spec = args.into_spec(command)?;
    match command {
        Command::Optimize => emit(&spec, &commands::optimize(&spec)?),
        Command::Sweep => emit(&spec, &commands::sweep(&spec)?),
        Command::Simulate => emit(&spec, &commands::simulate(&spec)?),
        Command::Tables => emit(&spec, &commands::tables(&spec)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
