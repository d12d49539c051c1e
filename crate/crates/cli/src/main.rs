//! `decodecv` command-line interface.
//!
//! Exit status is 0 on success, 2 when the configuration or an input file
//! is at fault, and 3 for any other failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use decodecv::harness::{self, report, ExperimentConfig, RunOptions};
use decodecv::par::with_jobs;
use decodecv::{Error, Execution};

#[derive(Parser)]
#[command(name = "decodecv", version, about = "Cross-validation and tuning benchmarks for linear decoders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write simulated train/test CSVs, one pair per μ.
    Simulate(Common),
    /// Run a benchmark and write its CSV tables.
    Run {
        #[command(subcommand)]
        benchmark: Benchmark,
    },
    /// Summarize a records CSV into markdown and derived CSVs.
    Report {
        /// Records table written by `run`.
        records: PathBuf,
        /// Output directory (defaults to the records file's directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and check a config, then print its hash.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum Benchmark {
    /// Compare CV strategies against held-out accuracy.
    CvBenchmark(Common),
    /// Compare tuning strategies by validation accuracy and weight stability.
    TuningBenchmark(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML). Built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of repeats (CV benchmark) or validation splits (tuning
    /// benchmark), overriding the config.
    #[arg(long)]
    repeats: Option<usize>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip per-feature variance normalization.
    #[arg(long)]
    no_variance_normalization: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

enum Which {
    Cv,
    Tuning,
    Simulate,
}

impl Common {
    fn load(&self, which: Which) -> Result<ExperimentConfig, Error> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(out) = &self.out {
            config.out = out.clone();
        }
        if let Some(n) = self.repeats {
            match which {
                Which::Cv => config.cv_benchmark.n_repeats = n,
                Which::Tuning => config.validation.n_repeats = n,
                Which::Simulate => {}
            }
        }
        if self.no_variance_normalization {
            config.preprocess.variance_normalization = false;
        }
        config.validate()?;
        Ok(config)
    }

    fn options(&self) -> RunOptions {
        let exec = if self.jobs == Some(1) { Execution::Sequential } else { Execution::Parallel };
        RunOptions { exec, ..RunOptions::default() }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate(common) => {
            let config = common.load(Which::Simulate)?;
            for path in harness::simulate_to_dir(&config, &config.out)? {
                println!("{}", path.display());
            }
        }
        Command::Run { benchmark: Benchmark::CvBenchmark(common) } => {
            let config = common.load(Which::Cv)?;
            let options = common.options();
            let records = with_jobs(common.jobs, || harness::run_cv_benchmark(&config, options))?;
            println!("{} records -> {}", records.len(), config.out.join(harness::CV_RECORDS).display());
        }
        Command::Run { benchmark: Benchmark::TuningBenchmark(common) } => {
            let config = common.load(Which::Tuning)?;
            let options = common.options();
            let tables = with_jobs(common.jobs, || harness::run_tuning_benchmark(&config, options))?;
            println!(
                "{} records -> {}",
                tables.records.len(),
                config.out.join(harness::TUNING_RECORDS).display()
            );
        }
        Command::Report { records, out } => {
            let out = out.unwrap_or_else(|| records.parent().map(PathBuf::from).unwrap_or_default());
            let (_, written) = report::report_to_dir(&records, &out)?;
            for path in written {
                println!("{}", path.display());
            }
        }
        Command::ValidateConfig { config } => {
            let config = ExperimentConfig::load(&config)?;
            println!("ok {}", config.hash()?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
