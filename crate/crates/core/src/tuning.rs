//! Nested cross-validation and the hyper-parameter strategies: refit at the
//! best mean inner accuracy, average the per-split best models, or skip
//! tuning with a fixed `C`.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::decoder::{default_grid, fit, DecoderSpec, LinearModel, TrainedModel};
use crate::error::{Error, Result};
use crate::evaluation::accuracy;
use crate::par::Execution;
use crate::preprocess::PreprocessOptions;
use crate::split::{CvStrategy, SplitPlan};
use crate::stats::{mean, pairwise_sum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    RefitBest,
    AverageBest,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningStrategy {
    pub kind: StrategyKind,
    /// Required iff `kind` is `Fixed`.
    #[serde(default, rename = "fixed_C", skip_serializing_if = "Option::is_none")]
    pub fixed_c: Option<f64>,
    /// Strictly increasing, positive.
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default = "default_inner")]
    pub inner: CvStrategy,
}

impl TuningStrategy {
    pub fn refit_best(grid: Vec<f64>, inner: CvStrategy) -> Self {
        Self { kind: StrategyKind::RefitBest, fixed_c: None, grid, inner }
    }

    pub fn average_best(grid: Vec<f64>, inner: CvStrategy) -> Self {
        Self { kind: StrategyKind::AverageBest, fixed_c: None, grid, inner }
    }

    pub fn fixed(c: f64) -> Self {
        Self { kind: StrategyKind::Fixed, fixed_c: Some(c), grid: default_grid(), inner: default_inner() }
    }

    /// Refit, average, `C = 1` and `C = 1000` with the default grid and
    /// inner loop.
    pub fn defaults() -> Vec<TuningStrategy> {
        vec![
            Self::refit_best(default_grid(), default_inner()),
            Self::average_best(default_grid(), default_inner()),
            Self::fixed(1.0),
            Self::fixed(1000.0),
        ]
    }

    pub fn name(&self) -> String {
        match self.kind {
            StrategyKind::RefitBest => "refit".into(),
            StrategyKind::AverageBest => "average".into(),
            StrategyKind::Fixed => format!("C={}", self.fixed_c.unwrap_or(f64::NAN)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            StrategyKind::Fixed => match self.fixed_c {
                Some(c) if c > 0.0 && c.is_finite() => Ok(()),
                other => Err(Error::InvalidStrategy(format!("fixed strategy needs C > 0, got {other:?}"))),
            },
            _ => {
                if self.fixed_c.is_some() {
                    return Err(Error::InvalidStrategy("fixed_C is only valid for the fixed strategy".into()));
                }
                validate_grid(&self.grid)
            }
        }
    }
}

pub fn default_inner() -> CvStrategy {
    CvStrategy::shuffled(10)
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidStrategy("empty C grid".into()));
    }
    if grid.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
        return Err(Error::InvalidStrategy("grid values must be finite and positive".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidStrategy("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Inner-test accuracy for every (inner split, C) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningCurve {
    pub grid: Vec<f64>,
    /// One row per inner split, one entry per grid value; `None` marks a
    /// split whose training side could not be fit.
    pub split_accuracies: Vec<Option<Vec<f64>>>,
    /// Mean over valid splits, per grid value.
    pub mean: Vec<f64>,
    pub n_invalid: usize,
}

impl TuningCurve {
    /// Grid index of the best mean accuracy; ties go to the smaller C.
    pub fn best_index(&self) -> usize {
        argmax_first(&self.mean)
    }
}

/// Index of the maximum, first index on ties (grid is increasing, so the
/// smaller C wins).
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// A tuning curve plus the model trained at each (split, C) cell.
#[derive(Debug, Clone)]
pub struct GridEvaluation {
    pub curve: TuningCurve,
    models: Vec<Option<Vec<TrainedModel>>>,
}

/// Runs the full (inner split × C) factorial on `data`.
pub fn evaluate_grid(
    data: &Dataset,
    spec: &DecoderSpec,
    grid: &[f64],
    plan: &SplitPlan,
    preprocess: &PreprocessOptions,
    exec: Execution,
) -> Result<GridEvaluation> {
    validate_grid(grid)?;
    plan.validate(data.n_samples())?;
    let n_c = grid.len();
    let cells = exec.map(plan.len() * n_c, |k| {
        let split = &plan.splits[k / n_c];
        let c = grid[k % n_c];
        let train = data.subset(&split.train);
        let test = data.subset(&split.test);
        let model = fit(&train, &spec.with_c(c), preprocess)?;
        let acc = accuracy(&model.predict(&test)?, test.labels())?;
        Ok::<_, Error>((acc, model))
    });

    let mut split_accuracies = Vec::with_capacity(plan.len());
    let mut models = Vec::with_capacity(plan.len());
    let mut cells = cells.into_iter();
    for s in 0..plan.len() {
        let row: Vec<Result<(f64, TrainedModel)>> = cells.by_ref().take(n_c).collect();
        if row.iter().any(|r| r.is_err()) {
            if let Some(Err(e)) = row.into_iter().find(|r| r.is_err()) {
                log::debug!("inner split {s} invalid: {e}");
            }
            split_accuracies.push(None);
            models.push(None);
        } else {
            let (accs, ms): (Vec<f64>, Vec<TrainedModel>) = row.into_iter().map(Result::unwrap).unzip();
            split_accuracies.push(Some(accs));
            models.push(Some(ms));
        }
    }
    let n_invalid = split_accuracies.iter().filter(|s| s.is_none()).count();
    if n_invalid > 0 {
        log::info!("{n_invalid} of {} inner splits invalid (single-class training side)", plan.len());
    }
    if n_invalid == plan.len() {
        return Err(Error::NoValidSplits);
    }
    let mean = (0..n_c)
        .map(|k| {
            let col: Vec<f64> = split_accuracies.iter().flatten().map(|row| row[k]).collect();
            pairwise_sum(&col) / col.len() as f64
        })
        .collect();
    Ok(GridEvaluation {
        curve: TuningCurve { grid: grid.to_vec(), split_accuracies, mean, n_invalid },
        models,
    })
}

/// Public entry point for the accuracy table alone.
pub fn tuning_curve(
    data: &Dataset,
    spec: &DecoderSpec,
    grid: &[f64],
    plan: &SplitPlan,
    preprocess: &PreprocessOptions,
    exec: Execution,
) -> Result<TuningCurve> {
    Ok(evaluate_grid(data, spec, grid, plan, preprocess, exec)?.curve)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChosenC {
    Single(f64),
    PerSplit(Vec<f64>),
}

impl ChosenC {
    /// `1` or `0.1;10;10` for per-split choices.
    pub fn to_field(&self) -> String {
        match self {
            ChosenC::Single(c) => c.to_string(),
            ChosenC::PerSplit(cs) => cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";"),
        }
    }
}

/// Mean of per-split models expressed on raw input features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedModel {
    pub model: LinearModel,
    pub members: Vec<LinearModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TunedModel {
    Refit(TrainedModel),
    Averaged(AveragedModel),
}

impl TunedModel {
    pub fn linear(&self) -> LinearModel {
        match self {
            TunedModel::Refit(m) => m.to_linear(),
            TunedModel::Averaged(a) => a.model.clone(),
        }
    }

    pub fn predict(&self, data: &Dataset) -> Result<Vec<i8>> {
        match self {
            TunedModel::Refit(m) => m.predict(data),
            TunedModel::Averaged(a) => a.model.predict(data),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningOutcome {
    pub strategy: String,
    pub model: TunedModel,
    pub chosen_c: ChosenC,
    /// Absent for fixed-C strategies.
    pub curve: Option<TuningCurve>,
    /// Inner-CV accuracy of the selected configuration.
    pub cv_estimate: Option<f64>,
}

impl TuningOutcome {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Tunes on the decoding set only. `seed` drives the inner split plan.
pub fn tune(
    decoding: &Dataset,
    strategy: &TuningStrategy,
    spec: &DecoderSpec,
    preprocess: &PreprocessOptions,
    seed: u64,
    exec: Execution,
) -> Result<TuningOutcome> {
    strategy.validate()?;
    if strategy.kind == StrategyKind::Fixed {
        return outcome_from_grid(decoding, strategy, spec, preprocess, None);
    }
    let plan = strategy.inner.plan(decoding, seed)?;
    let eval = evaluate_grid(decoding, spec, &strategy.grid, &plan, preprocess, exec)?;
    outcome_from_grid(decoding, strategy, spec, preprocess, Some(&eval))
}

/// Builds an outcome from an already evaluated grid, so several strategies
/// can share one inner loop. `eval` is ignored for fixed strategies.
pub fn outcome_from_grid(
    decoding: &Dataset,
    strategy: &TuningStrategy,
    spec: &DecoderSpec,
    preprocess: &PreprocessOptions,
    eval: Option<&GridEvaluation>,
) -> Result<TuningOutcome> {
    strategy.validate()?;
    let name = strategy.name();
    match strategy.kind {
        StrategyKind::Fixed => {
            let c = strategy.fixed_c.expect("validated");
            let model = fit(decoding, &spec.with_c(c), preprocess)?;
            Ok(TuningOutcome {
                strategy: name,
                model: TunedModel::Refit(model),
                chosen_c: ChosenC::Single(c),
                curve: None,
                cv_estimate: None,
            })
        }
        StrategyKind::RefitBest => {
            let eval = eval.ok_or_else(|| Error::InvalidStrategy("refit needs a grid evaluation".into()))?;
            let best = eval.curve.best_index();
            let c = eval.curve.grid[best];
            let model = fit(decoding, &spec.with_c(c), preprocess)?;
            Ok(TuningOutcome {
                strategy: name,
                model: TunedModel::Refit(model),
                chosen_c: ChosenC::Single(c),
                cv_estimate: Some(eval.curve.mean[best]),
                curve: Some(eval.curve.clone()),
            })
        }
        StrategyKind::AverageBest => {
            let eval = eval.ok_or_else(|| Error::InvalidStrategy("averaging needs a grid evaluation".into()))?;
            let mut members = Vec::new();
            let mut chosen = Vec::new();
            let mut best_accs = Vec::new();
            for (accs, models) in eval.curve.split_accuracies.iter().zip(&eval.models) {
                if let (Some(accs), Some(models)) = (accs, models) {
                    let k = argmax_first(accs);
                    members.push(models[k].to_linear());
                    chosen.push(eval.curve.grid[k]);
                    best_accs.push(accs[k]);
                }
            }
            let model = average_linear(&members);
            Ok(TuningOutcome {
                strategy: name,
                model: TunedModel::Averaged(AveragedModel { model, members }),
                chosen_c: ChosenC::PerSplit(chosen),
                cv_estimate: mean(&best_accs),
                curve: Some(eval.curve.clone()),
            })
        }
    }
}

/// Coordinate-wise mean of weights and intercepts.
pub fn average_linear(models: &[LinearModel]) -> LinearModel {
    assert!(!models.is_empty(), "nothing to average");
    let d = models[0].weights.len();
    let weights = (0..d)
        .map(|j| {
            let col: Vec<f64> = models.iter().map(|m| m.weights[j]).collect();
            pairwise_sum(&col) / models.len() as f64
        })
        .collect();
    let intercepts: Vec<f64> = models.iter().map(|m| m.intercept).collect();
    LinearModel {
        weights,
        intercept: pairwise_sum(&intercepts) / models.len() as f64,
    }
}
