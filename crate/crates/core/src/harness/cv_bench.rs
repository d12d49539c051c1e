//! CV-strategy benchmark: how far each cross-validation scheme's estimate
//! lands from the accuracy measured on independent data.
//!
//! For simulated tasks every repeat draws a fresh training set and a large
//! test set; the test accuracy of the model fit on the whole training set
//! is the truth. For CSV tasks each repeat is one validation split: the
//! decoding side plays the training set and the validation side the test
//! set.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, TaskSource};
use super::records::{write_csv, Record};
use super::{checkpoint_path, create_dir, dataset_label, run_units, seeds, simulation_base, write_config_sidecar, RunOptions, CV_RECORDS};
use crate::data::Dataset;
use crate::decoder::fit;
use crate::error::Result;
use crate::evaluation::{accuracy, cv_estimate, Pipeline};
use crate::par::Execution;
use crate::simulate::{generate, SimulationConfig};
use crate::split::{validation_split, SplitPlan};

const BENCHMARK: &str = "cv-benchmark";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct UnitResult {
    records: Vec<Record>,
    plans: Vec<SplitPlan>,
}

/// Runs the benchmark and writes `cv_records.csv` (plus sidecars) to
/// `config.out`. Returns the records in (task, repeat, strategy) order.
pub fn run_cv_benchmark(config: &ExperimentConfig, options: RunOptions) -> Result<Vec<Record>> {
    config.validate()?;
    let out = config.out.as_path();
    create_dir(out)?;
    write_config_sidecar(config, out)?;
    let hash = config.hash()?;
    let tasks = config.tasks();
    let n_repeats = config.cv_benchmark.n_repeats;

    // CSV tasks are loaded once and split up front
    let mut file_data: Vec<Option<(Dataset, SplitPlan)>> = Vec::new();
    for (t, task) in tasks.iter().enumerate() {
        file_data.push(match &task.source {
            TaskSource::File(path) => {
                let data = Dataset::read_csv(path)?;
                let plan = validation_split(
                    &data,
                    n_repeats,
                    config.validation.fraction,
                    seeds::derive(config.seed, &[seeds::VALIDATION, t as u64]),
                )?;
                Some((data, plan))
            }
            TaskSource::Simulated { .. } => None,
        });
    }

    let units: Vec<Vec<usize>> = (0..tasks.len())
        .flat_map(|t| (0..n_repeats).map(move |r| vec![t, r]))
        .collect();
    let results: Vec<UnitResult> = run_units(&units, &checkpoint_path(out, BENCHMARK), BENCHMARK, &hash, options, |u| {
        let (t, r) = (u[0], u[1]);
        let (train, test) = match (&tasks[t].source, &file_data[t]) {
            (TaskSource::Simulated { mu }, _) => {
                let (base, _) = simulation_base(config).expect("simulated config");
                let sim = SimulationConfig {
                    mu: *mu,
                    seed: seeds::derive(config.seed, &[seeds::SIMULATION, t as u64, r as u64]),
                    ..base.clone()
                };
                generate(&sim)?
            }
            (TaskSource::File(_), Some((data, plan))) => {
                let split = &plan.splits[r];
                (data.subset(&split.train), data.subset(&split.test))
            }
            (TaskSource::File(_), None) => unreachable!("file tasks are loaded above"),
        };
        run_repeat(config, t, r, &train, &test, &hash, options.exec)
    })?;

    let mut records = Vec::new();
    for (unit, result) in units.iter().zip(&results) {
        if config.write_plans {
            for (s, plan) in result.plans.iter().enumerate() {
                super::write_plan(out, &format!("cv_t{}_r{}_s{s}.json", unit[0], unit[1]), plan)?;
            }
        }
        records.extend(result.records.iter().cloned());
    }
    write_csv(&out.join(CV_RECORDS), &records)?;
    Ok(records)
}

/// One repeat: the truth for `(train, test)` and every CV strategy's
/// estimate on `train`.
fn run_repeat(
    config: &ExperimentConfig,
    t: usize,
    r: usize,
    train: &Dataset,
    test: &Dataset,
    hash: &str,
    exec: Execution,
) -> Result<UnitResult> {
    let task = &config.tasks()[t];
    let spec = config.cv_benchmark.decoder;
    let pipeline = Pipeline { spec, preprocess: config.preprocess };
    let model = fit(train, &spec, &config.preprocess)?;
    let truth = accuracy(&model.predict(test)?, test.labels())?;

    let mut records = Vec::new();
    let mut plans = Vec::new();
    for (s, strategy) in config.cv_strategies.iter().enumerate() {
        let started = Instant::now();
        let plan = strategy.plan(train, seeds::derive(config.seed, &[seeds::CV_PLAN, t as u64, r as u64, s as u64]))?;
        let est = cv_estimate(train, &plan, &pipeline, exec)?;
        let runtime = config.record_runtime.then(|| started.elapsed().as_secs_f64());
        records.push(Record {
            dataset: dataset_label(task, train),
            task: task.name.clone(),
            validation_split: r,
            decoder: decoder_family(&spec),
            penalty: spec.penalty.to_string(),
            strategy: strategy.name(),
            cv_estimate: Some(est.estimate),
            validation_accuracy: truth,
            delta: Some(est.estimate - truth),
            stability: None,
            chosen_c: spec.c.to_string(),
            runtime,
            config_hash: hash.to_string(),
            seed: config.seed,
        });
        if config.write_plans {
            plans.push(plan);
        }
    }
    Ok(UnitResult { records, plans })
}

pub(crate) fn decoder_family(spec: &crate::decoder::DecoderSpec) -> String {
    match spec.loss {
        crate::decoder::Loss::Hinge => "svm".into(),
        crate::decoder::Loss::Logistic => "logreg".into(),
    }
}

