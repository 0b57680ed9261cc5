//! Command-line front end: `run` executes a Monte-Carlo sweep, `plot`
//! re-renders an SVG from a records CSV, `check` reports feasibility of a
//! system dimension tuple.
//!
//! Exit codes: 0 success, 1 expected failure (infeasible system, failed
//! trials), 2 usage or I/O error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use secia_core::experiment::{self, ExperimentSpec};
use secia_core::system::{check_properness, SystemConfig};
use secia_core::{plot, Error};

#[derive(Parser)]
#[command(name = "secia", about = "Secure interference alignment experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo experiment and write CSV + SVG outputs.
    Run(RunArgs),
    /// Render the SSR-vs-SNR plot from an existing records CSV.
    Plot(PlotArgs),
    /// Check alignment feasibility of a system dimension tuple.
    Check(CheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file; flags below override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated SNR grid in dB, e.g. "0,10,20,30".
    #[arg(long)]
    snr: Option<String>,
    /// Comma-separated subset of: conventional, nn, rnn.
    #[arg(long)]
    algs: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Users K.
    #[arg(long)]
    k: Option<usize>,
    /// Transmit antennas per user.
    #[arg(long)]
    nt: Option<usize>,
    /// Receive antennas per user.
    #[arg(long)]
    nr: Option<usize>,
    /// Eavesdropper antennas.
    #[arg(long)]
    nre: Option<usize>,
    /// Streams per user.
    #[arg(long)]
    d: Option<usize>,
    /// Re-optimize at every SNR point instead of rescaling.
    #[arg(long)]
    reoptimize_per_snr: bool,
    /// Record wall-clock times (makes the CSV non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// Records CSV produced by `run`.
    #[arg(long)]
    records: PathBuf,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    nt: usize,
    #[arg(long)]
    nr: usize,
    #[arg(long)]
    nre: usize,
    #[arg(long)]
    d: usize,
}

fn build_spec(args: &RunArgs) -> Result<ExperimentSpec, Error> {
    let mut settings: BTreeMap<String, String> = match &args.config {
        Some(path) => experiment::parse_settings(&std::fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    let mut set = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            settings.insert(key.to_string(), v);
        }
    };
    set("trials", args.trials.map(|v| v.to_string()));
    set("snr_db", args.snr.clone());
    set("algorithms", args.algs.clone());
    set("master_seed", args.seed.map(|v| v.to_string()));
    set(
        "output_dir",
        args.out.as_ref().map(|p| p.display().to_string()),
    );
    set("k", args.k.map(|v| v.to_string()));
    set("n_t", args.nt.map(|v| v.to_string()));
    set("n_r", args.nr.map(|v| v.to_string()));
    set("n_re", args.nre.map(|v| v.to_string()));
    set("d", args.d.map(|v| v.to_string()));
    if args.reoptimize_per_snr {
        settings.insert("reoptimize_per_snr".into(), "true".into());
    }
    if args.timing {
        settings.insert("timing".into(), "true".into());
    }
    ExperimentSpec::from_settings(&settings)
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode, Error> {
    let spec = build_spec(args)?;
    let report = check_properness(&spec.config);
    if !report.proper {
        eprintln!(
            "system ({}x{},{},{})^{} is improper: tx slack {}, rx slack {}",
            spec.config.tx_antennas,
            spec.config.rx_antennas,
            spec.config.eve_antennas,
            spec.config.streams,
            spec.config.users,
            report.tx_dimension,
            report.rx_dimension
        );
        return Ok(ExitCode::from(1));
    }
    let outcome = experiment::run_experiment(&spec)?;
    println!(
        "wrote {} records ({} trials, {} SNR points) to {}",
        outcome.records.len(),
        spec.trials,
        spec.snr_grid_db.len(),
        spec.output_dir.display()
    );
    for row in &outcome.summary {
        println!(
            "  {:<13} {:>6.1} dB  mean SSR {:>10.4}  stderr {:>8.4}  n={}",
            row.algorithm.name(),
            row.snr_db,
            row.mean_ssr,
            row.stderr_ssr,
            row.n
        );
    }
    if !outcome.failures.is_empty() {
        for f in &outcome.failures {
            eprintln!("failed: {} trial {}: {}", f.algorithm.name(), f.trial, f.message);
        }
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(args: &PlotArgs) -> Result<ExitCode, Error> {
    let records = experiment::parse_csv(&args.records)?;
    let summary = experiment::summarize(&records);
    plot::emit_plot(&summary, &args.out)?;
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: &CheckArgs) -> Result<ExitCode, Error> {
    let config = SystemConfig::new(args.k, args.nt, args.nr, args.nre, args.d, 1.0, 1.0)?;
    let report = check_properness(&config);
    println!(
        "system ({}x{},{},{})^{}",
        args.nt, args.nr, args.nre, args.d, args.k
    );
    println!("  tx dimension slack (N_t - d - N_re): {}", report.tx_dimension);
    println!("  rx dimension slack (N_r - K d):      {}", report.rx_dimension);
    println!("  eavesdropper counting bound:         {}", report.eve_bound);
    println!("  proper: {}", report.proper);
    Ok(if report.proper {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
