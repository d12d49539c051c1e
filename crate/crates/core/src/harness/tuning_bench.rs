//! Tuning-strategy benchmark: nested CV on the decoding side of each
//! validation split, accuracy on the validation side, and weight stability
//! across splits.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, TaskSource};
use super::cv_bench::decoder_family;
use super::records::{write_csv, CurveRow, Record, WeightRow};
use super::{
    checkpoint_path, create_dir, dataset_label, run_units, seeds, simulation_base, write_config_sidecar, write_plan,
    RunOptions, CURVES, TUNING_RECORDS, WEIGHTS,
};
use crate::data::Dataset;
use crate::decoder::DecoderSpec;
use crate::error::Result;
use crate::evaluation::{accuracy, stability};
use crate::par::Execution;
use crate::preprocess::PreprocessOptions;
use crate::simulate::{generate, SimulationConfig};
use crate::split::{validation_split, Split, SplitPlan};
use crate::tuning::{evaluate_grid, outcome_from_grid, GridEvaluation, StrategyKind, TuningOutcome, TuningStrategy};

const BENCHMARK: &str = "tuning-benchmark";

/// Everything the tuning benchmark writes.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningTables {
    pub records: Vec<Record>,
    pub weights: Vec<WeightRow>,
    pub curves: Vec<CurveRow>,
}

/// Outcomes of every strategy for one decoder on one validation split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitEvaluation {
    pub outcomes: Vec<TuningOutcome>,
    pub validation_accuracy: Vec<f64>,
    /// Seconds spent per strategy, including its share of the inner loop.
    pub runtime: Vec<f64>,
}

/// Tunes every strategy on the train side of `split` and only then scores
/// the tuned models on its test side.
///
/// Strategies with the same grid and inner CV share one evaluation of the
/// (inner split × C) table.
pub fn evaluate_split(
    pool: &Dataset,
    split: &Split,
    spec: &DecoderSpec,
    strategies: &[TuningStrategy],
    preprocess: &PreprocessOptions,
    inner_seed: u64,
    exec: Execution,
) -> Result<SplitEvaluation> {
    let decoding = pool.subset(&split.train);
    let mut shared: Vec<(usize, GridEvaluation, f64)> = Vec::new();
    let mut outcomes = Vec::with_capacity(strategies.len());
    let mut runtime = Vec::with_capacity(strategies.len());
    for (k, strategy) in strategies.iter().enumerate() {
        strategy.validate()?;
        let started = Instant::now();
        let mut inner_secs = 0.0;
        let eval = if strategy.kind == StrategyKind::Fixed {
            None
        } else {
            let found = shared.iter().position(|(j, _, _)| {
                strategies[*j].grid == strategy.grid && strategies[*j].inner == strategy.inner
            });
            let pos = match found {
                Some(pos) => pos,
                None => {
                    let plan = strategy.inner.plan(&decoding, inner_seed)?;
                    let eval = evaluate_grid(&decoding, spec, &strategy.grid, &plan, preprocess, exec)?;
                    shared.push((k, eval, started.elapsed().as_secs_f64()));
                    shared.len() - 1
                }
            };
            inner_secs = if found.is_some() { shared[pos].2 } else { 0.0 };
            Some(&shared[pos].1)
        };
        outcomes.push(outcome_from_grid(&decoding, strategy, spec, preprocess, eval)?);
        runtime.push(started.elapsed().as_secs_f64() + inner_secs);
    }

    let validation = pool.subset(&split.test);
    let validation_accuracy = outcomes
        .iter()
        .map(|o| accuracy(&o.model.predict(&validation)?, validation.labels()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SplitEvaluation { outcomes, validation_accuracy, runtime })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct UnitResult {
    records: Vec<Record>,
    weights: Vec<Vec<f64>>,
    intercepts: Vec<f64>,
    curves: Vec<CurveRow>,
}

/// The data a task's validation splits are drawn from.
fn task_pool(config: &ExperimentConfig, t: usize, source: &TaskSource) -> Result<Dataset> {
    match source {
        TaskSource::Simulated { mu } => {
            let (base, factor) = simulation_base(config).expect("simulated config");
            let sim = SimulationConfig {
                mu: *mu,
                n_train: base.n_train * factor,
                n_blocks: base.n_blocks * factor,
                // only the training side is used
                n_test: 2 * base.n_blocks * factor,
                seed: seeds::derive(config.seed, &[seeds::TUNING_POOL, t as u64]),
                ..base.clone()
            };
            Ok(generate(&sim)?.0)
        }
        TaskSource::File(path) => Dataset::read_csv(path),
    }
}

/// Runs the benchmark, writes `tuning_records.csv`, `weights.csv`,
/// `curves.csv` and sidecars to `config.out`.
pub fn run_tuning_benchmark(config: &ExperimentConfig, options: RunOptions) -> Result<TuningTables> {
    config.validate()?;
    let out = config.out.as_path();
    create_dir(out)?;
    write_config_sidecar(config, out)?;
    let hash = config.hash()?;
    let tasks = config.tasks();

    let mut pools = Vec::with_capacity(tasks.len());
    let mut plans: Vec<SplitPlan> = Vec::with_capacity(tasks.len());
    for (t, task) in tasks.iter().enumerate() {
        let pool = task_pool(config, t, &task.source)?;
        let plan = validation_split(
            &pool,
            config.validation.n_repeats,
            config.validation.fraction,
            seeds::derive(config.seed, &[seeds::VALIDATION, t as u64]),
        )?;
        write_plan(out, &format!("validation_t{t}.json"), &plan)?;
        pools.push(pool);
        plans.push(plan);
    }

    let n_splits = config.validation.n_repeats;
    let n_decoders = config.decoders.len();
    let units: Vec<Vec<usize>> = (0..tasks.len())
        .flat_map(|t| (0..n_splits).flat_map(move |s| (0..n_decoders).map(move |d| vec![t, s, d])))
        .collect();
    let results: Vec<UnitResult> = run_units(&units, &checkpoint_path(out, BENCHMARK), BENCHMARK, &hash, options, |u| {
        let (t, s, d) = (u[0], u[1], u[2]);
        let spec = &config.decoders[d];
        let inner_seed = seeds::derive(config.seed, &[seeds::INNER, t as u64, s as u64]);
        let eval = evaluate_split(&pools[t], &plans[t].splits[s], spec, &config.tuning, &config.preprocess, inner_seed, options.exec)?;
        let label = dataset_label(&tasks[t], &pools[t]);
        let mut unit = UnitResult { records: Vec::new(), weights: Vec::new(), intercepts: Vec::new(), curves: Vec::new() };
        let mut curve_written = false;
        for (k, outcome) in eval.outcomes.iter().enumerate() {
            let val = eval.validation_accuracy[k];
            unit.records.push(Record {
                dataset: label.clone(),
                task: tasks[t].name.clone(),
                validation_split: s,
                decoder: decoder_family(spec),
                penalty: spec.penalty.to_string(),
                strategy: outcome.strategy.clone(),
                cv_estimate: outcome.cv_estimate,
                validation_accuracy: val,
                delta: outcome.cv_estimate.map(|cv| cv - val),
                stability: None,
                chosen_c: outcome.chosen_c.to_field(),
                runtime: config.record_runtime.then_some(eval.runtime[k]),
                config_hash: hash.clone(),
                seed: config.seed,
            });
            let linear = outcome.model.linear();
            unit.weights.push(linear.weights);
            unit.intercepts.push(linear.intercept);
            // strategies sharing one inner loop share one curve; the first
            // tuned strategy's copy is written
            if let (Some(curve), false) = (&outcome.curve, curve_written) {
                curve_written = true;
                for (i, row) in curve.split_accuracies.iter().enumerate() {
                    let Some(row) = row else { continue };
                    for (c, acc) in curve.grid.iter().zip(row) {
                        unit.curves.push(CurveRow {
                            dataset: label.clone(),
                            task: tasks[t].name.clone(),
                            validation_split: s,
                            decoder: decoder_family(spec),
                            penalty: spec.penalty.to_string(),
                            inner_split: i,
                            c: *c,
                            accuracy: *acc,
                        });
                    }
                }
            }
        }
        Ok(unit)
    })?;

    // stability of each (task, decoder, strategy) across validation splits
    let n_strategies = config.tuning.len();
    let mut stab = vec![vec![vec![None; n_strategies]; n_decoders]; tasks.len()];
    if n_splits >= 2 {
        for t in 0..tasks.len() {
            for d in 0..n_decoders {
                for k in 0..n_strategies {
                    let vectors: Vec<Vec<f64>> = (0..n_splits)
                        .map(|s| results[(t * n_splits + s) * n_decoders + d].weights[k].clone())
                        .collect();
                    stab[t][d][k] = Some(stability(&vectors)?.value);
                }
            }
        }
    }

    let mut tables = TuningTables { records: Vec::new(), weights: Vec::new(), curves: Vec::new() };
    for (unit, result) in units.iter().zip(results) {
        let (t, d) = (unit[0], unit[2]);
        for (k, mut record) in result.records.into_iter().enumerate() {
            record.stability = stab[t][d][k];
            for (j, w) in result.weights[k].iter().enumerate() {
                tables.weights.push(weight_row(&record, j.to_string(), *w));
            }
            tables.weights.push(weight_row(&record, "intercept".into(), result.intercepts[k]));
            tables.records.push(record);
        }
        tables.curves.extend(result.curves);
    }
    write_csv(&out.join(TUNING_RECORDS), &tables.records)?;
    write_csv(&out.join(WEIGHTS), &tables.weights)?;
    write_csv(&out.join(CURVES), &tables.curves)?;
    Ok(tables)
}

fn weight_row(r: &Record, feature: String, weight: f64) -> WeightRow {
    WeightRow {
        dataset: r.dataset.clone(),
        task: r.task.clone(),
        validation_split: r.validation_split,
        decoder: r.decoder.clone(),
        penalty: r.penalty.clone(),
        strategy: r.strategy.clone(),
        feature,
        weight,
    }
}
