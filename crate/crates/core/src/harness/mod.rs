//! Experiment orchestration: configs, seeded benchmarks, CSV records and
//! reports.
//!
//! Every random draw in a benchmark is seeded by [`seeds::derive`] from the
//! master seed and the position of the work unit, so results do not depend
//! on the order in which units run or on the number of workers. Units are
//! evaluated in chunks; after each chunk a single writer appends the
//! finished units to a checkpoint log, and the final tables are written in
//! unit order.

pub mod checkpoint;
pub mod config;
pub mod cv_bench;
pub mod records;
pub mod report;
pub mod seeds;
pub mod tuning_bench;

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::simulate::{generate, SimulationConfig};
use crate::split::SplitPlan;

pub use config::{ExperimentConfig, Task, TaskSource};
pub use cv_bench::run_cv_benchmark;
pub use records::Record;
pub use report::{report, Report};
pub use tuning_bench::{run_tuning_benchmark, TuningTables};

pub const CV_RECORDS: &str = "cv_records.csv";
pub const TUNING_RECORDS: &str = "tuning_records.csv";
pub const WEIGHTS: &str = "weights.csv";
pub const CURVES: &str = "curves.csv";
pub const CONFIG_SIDECAR: &str = "config.json";

/// How a benchmark run is executed. None of these settings change results.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub exec: Execution,
    /// Units evaluated between checkpoint flushes.
    pub chunk_size: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { exec: Execution::Parallel, chunk_size: 16 }
    }
}

pub(crate) fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::File { path: dir.to_path_buf(), message: e.to_string() })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::File { path: path.to_path_buf(), message: e.to_string() })
}

/// Writes `config.json` next to the outputs: the canonical config and its
/// hash.
pub fn write_config_sidecar(config: &ExperimentConfig, dir: &Path) -> Result<()> {
    let canonical: serde_json::Value = serde_json::from_str(&config.canonical_json()?)?;
    let value = serde_json::json!({ "config": canonical, "config_hash": config.hash()? });
    write_text(&dir.join(CONFIG_SIDECAR), &(serde_json::to_string_pretty(&value)? + "\n"))
}

pub(crate) fn write_plan(dir: &Path, file: &str, plan: &SplitPlan) -> Result<()> {
    let plans = dir.join("plans");
    create_dir(&plans)?;
    write_text(&plans.join(file), &(plan.to_json()? + "\n"))
}

/// Base simulation settings of a simulated config.
pub(crate) fn simulation_base(config: &ExperimentConfig) -> Option<(&SimulationConfig, usize)> {
    match &config.data {
        config::DataSource::Simulation { simulation, tuning_pool_factor, .. } => {
            Some((simulation, *tuning_pool_factor))
        }
        config::DataSource::Csv { .. } => None,
    }
}

pub(crate) fn dataset_label(task: &Task, data: &Dataset) -> String {
    match task.source {
        TaskSource::Simulated { .. } => "simulation".into(),
        TaskSource::File(_) => data.name.clone(),
    }
}

/// Evaluates `units` in chunks, resuming from and appending to the
/// checkpoint at `checkpoint_path`. Results come back in unit order.
pub(crate) fn run_units<U, F>(
    units: &[Vec<usize>],
    checkpoint_path: &Path,
    benchmark: &str,
    config_hash: &str,
    options: RunOptions,
    f: F,
) -> Result<Vec<U>>
where
    U: Serialize + DeserializeOwned + Send,
    F: Fn(&[usize]) -> Result<U> + Sync + Send,
{
    let (mut cp, mut done) = checkpoint::Checkpoint::open::<U>(checkpoint_path, benchmark, config_hash)?;
    let todo: Vec<&Vec<usize>> = units.iter().filter(|u| !done.contains_key(*u)).collect();
    for chunk in todo.chunks(options.chunk_size.max(1)) {
        let results = options.exec.map(chunk.len(), |k| f(chunk[k]));
        for (unit, result) in chunk.iter().zip(results) {
            let result = result?;
            cp.append(unit, &result)?;
            done.insert((*unit).clone(), result);
        }
        log::info!("{benchmark}: {}/{} units done", done.len(), units.len());
    }
    cp.finish()?;
    let mut out = Vec::with_capacity(units.len());
    for u in units {
        out.push(done.remove(u).expect("every unit evaluated"));
    }
    Ok(out)
}

pub(crate) fn checkpoint_path(out: &Path, benchmark: &str) -> PathBuf {
    out.join(format!(".{benchmark}.checkpoint.jsonl"))
}

/// Writes one train/test pair per μ of a simulated config, seeded like the
/// first repeat of the CV benchmark. Returns the written paths.
pub fn simulate_to_dir(config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let Some((base, _)) = simulation_base(config) else {
        return Err(Error::Config("simulate needs a `simulation` data source".into()));
    };
    create_dir(out)?;
    let mut written = Vec::new();
    for (t, task) in config.tasks().iter().enumerate() {
        let TaskSource::Simulated { mu } = task.source else { unreachable!() };
        let sim = SimulationConfig {
            mu,
            seed: seeds::derive(config.seed, &[seeds::SIMULATION, t as u64, 0]),
            ..base.clone()
        };
        let (train, test) = generate(&sim)?;
        for (set, suffix) in [(&train, "train"), (&test, "test")] {
            let path = out.join(format!("simulation_mu{mu}_{suffix}.csv"));
            set.write_csv(&path)?;
            written.push(path);
        }
    }
    write_config_sidecar(config, out)?;
    Ok(written)
}
