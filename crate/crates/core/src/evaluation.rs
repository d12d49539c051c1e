//! Accuracy, cross-validated estimates, CV-vs-validation discrepancy,
//! weight stability and the prediction/stability tradeoff summary.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::decoder::{fit, DecoderSpec, LinearModel, TrainedModel};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::preprocess::PreprocessOptions;
use crate::split::SplitPlan;
use crate::stats::{mean, pairwise_sum, pearson, percentile_sorted};
use crate::tuning::{tune, TunedModel, TuningStrategy};

/// Fraction of equal entries.
pub fn accuracy(predicted: &[i8], truth: &[i8]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::Evaluation(format!(
            "length mismatch: {} predictions, {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::Evaluation("accuracy of an empty set".into()));
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Something that can label samples.
pub trait Predictor {
    fn predict(&self, data: &Dataset) -> Result<Vec<i8>>;
}

impl Predictor for TrainedModel {
    fn predict(&self, data: &Dataset) -> Result<Vec<i8>> {
        TrainedModel::predict(self, data)
    }
}

impl Predictor for LinearModel {
    fn predict(&self, data: &Dataset) -> Result<Vec<i8>> {
        LinearModel::predict(self, data)
    }
}

impl Predictor for TunedModel {
    fn predict(&self, data: &Dataset) -> Result<Vec<i8>> {
        TunedModel::predict(self, data)
    }
}

/// A training procedure: preprocessing plus decoder, or a whole tuning
/// strategy.
pub trait Learner: Sync {
    type Model: Predictor;
    fn learn(&self, train: &Dataset) -> Result<Self::Model>;
}

#[derive(Debug, Clone, Copy)]
pub struct Pipeline {
    pub spec: DecoderSpec,
    pub preprocess: PreprocessOptions,
}

impl Learner for Pipeline {
    type Model = TrainedModel;
    fn learn(&self, train: &Dataset) -> Result<TrainedModel> {
        fit(train, &self.spec, &self.preprocess)
    }
}

/// Nested learner: every fit runs the full tuning strategy on its training
/// side (sequentially, the outer loop provides the parallelism).
#[derive(Debug, Clone)]
pub struct TunedPipeline {
    pub strategy: TuningStrategy,
    pub spec: DecoderSpec,
    pub preprocess: PreprocessOptions,
    pub seed: u64,
}

impl Learner for TunedPipeline {
    type Model = TunedModel;
    fn learn(&self, train: &Dataset) -> Result<TunedModel> {
        let outcome = tune(train, &self.strategy, &self.spec, &self.preprocess, self.seed, Execution::Sequential)?;
        Ok(outcome.model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvEstimate {
    pub estimate: f64,
    /// Test accuracy per split; `None` for splits that could not be fit.
    pub per_split: Vec<Option<f64>>,
    pub n_invalid: usize,
}

/// Mean test accuracy over the splits of `plan`, each fit on its own
/// training side only.
pub fn cv_estimate<L: Learner>(
    data: &Dataset,
    plan: &SplitPlan,
    learner: &L,
    exec: Execution,
) -> Result<CvEstimate> {
    plan.validate(data.n_samples())?;
    let per_split: Vec<Option<f64>> = exec.map(plan.len(), |k| {
        let split = &plan.splits[k];
        let train = data.subset(&split.train);
        let test = data.subset(&split.test);
        let score = learner
            .learn(&train)
            .and_then(|m| accuracy(&m.predict(&test)?, test.labels()));
        match score {
            Ok(a) => Some(a),
            Err(e) => {
                log::debug!("split {k} invalid: {e}");
                None
            }
        }
    });
    let valid: Vec<f64> = per_split.iter().flatten().copied().collect();
    let estimate = mean(&valid).ok_or(Error::NoValidSplits)?;
    Ok(CvEstimate {
        estimate,
        n_invalid: per_split.len() - valid.len(),
        per_split,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyStats {
    pub deltas: Vec<f64>,
    pub mean: f64,
    pub p5: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub p95: f64,
}

impl DiscrepancyStats {
    pub fn from_deltas(deltas: Vec<f64>) -> Result<Self> {
        let m = mean(&deltas).ok_or_else(|| Error::Evaluation("no records".into()))?;
        let mut sorted = deltas.clone();
        sorted.sort_by(f64::total_cmp);
        let q = |p| percentile_sorted(&sorted, p);
        Ok(Self {
            mean: m,
            p5: q(0.05),
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            p95: q(0.95),
            deltas,
        })
    }
}

/// Statistics of `cv_estimate − validation_accuracy` over records.
pub fn discrepancy(records: &[(f64, f64)]) -> Result<DiscrepancyStats> {
    DiscrepancyStats::from_deltas(records.iter().map(|(cv, val)| cv - val).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub value: f64,
    /// Pairs involving a zero-variance vector, counted as correlation 0.
    pub degenerate_pairs: usize,
}

/// Mean Pearson correlation over all unordered pairs of weight vectors.
pub fn stability(vectors: &[Vec<f64>]) -> Result<Stability> {
    if vectors.len() < 2 {
        return Err(Error::Evaluation("stability needs at least 2 weight vectors".into()));
    }
    let d = vectors[0].len();
    if vectors.iter().any(|v| v.len() != d) {
        return Err(Error::Evaluation("weight vectors differ in length".into()));
    }
    let mut corrs = Vec::new();
    let mut degenerate = 0;
    for a in 0..vectors.len() {
        for b in a + 1..vectors.len() {
            match pearson(&vectors[a], &vectors[b]) {
                Some(r) => corrs.push(r),
                None => {
                    degenerate += 1;
                    corrs.push(0.0);
                }
            }
        }
    }
    if degenerate > 0 {
        log::warn!("{degenerate} weight-vector pairs had zero variance; counted as correlation 0");
    }
    Ok(Stability {
        value: pairwise_sum(&corrs) / corrs.len() as f64,
        degenerate_pairs: degenerate,
    })
}

/// One strategy's result on one validation split.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyObservation {
    pub task: String,
    pub split: usize,
    pub decoder: String,
    pub strategy: String,
    pub accuracy: f64,
    /// Stability of the (task, decoder, strategy) triple across splits.
    pub stability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub decoder: String,
    pub strategy: String,
    pub n: usize,
    pub mean_delta_accuracy: f64,
    pub q25_delta_accuracy: f64,
    pub q75_delta_accuracy: f64,
    pub mean_delta_stability: Option<f64>,
    pub q25_delta_stability: Option<f64>,
    pub q75_delta_stability: Option<f64>,
}

/// Accuracy deltas to the mean across strategies of the same (task, split,
/// decoder), in input order.
pub fn accuracy_deltas(obs: &[StrategyObservation]) -> Vec<f64> {
    let mut groups: BTreeMap<(&str, usize, &str), Vec<f64>> = BTreeMap::new();
    for o in obs {
        groups.entry((&o.task, o.split, &o.decoder)).or_default().push(o.accuracy);
    }
    let means: BTreeMap<_, f64> = groups
        .into_iter()
        .map(|(k, v)| (k, pairwise_sum(&v) / v.len() as f64))
        .collect();
    obs.iter()
        .map(|o| o.accuracy - means[&(o.task.as_str(), o.split, o.decoder.as_str())])
        .collect()
}

/// Per (decoder, strategy): mean and quartiles of accuracy deltas (per
/// split) and of stability deltas (per task), both centred on the mean
/// across strategies.
pub fn tradeoff_summary(obs: &[StrategyObservation]) -> Result<Vec<TradeoffRow>> {
    if obs.is_empty() {
        return Err(Error::Evaluation("no observations".into()));
    }
    let acc_deltas = accuracy_deltas(obs);

    // one stability value per (task, decoder, strategy)
    let mut stab: BTreeMap<(&str, &str, &str), f64> = BTreeMap::new();
    for o in obs {
        if let Some(s) = o.stability {
            stab.insert((&o.task, &o.decoder, &o.strategy), s);
        }
    }
    let mut stab_groups: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
    for (&(t, d, _), &s) in &stab {
        stab_groups.entry((t, d)).or_default().push(s);
    }
    let stab_means: BTreeMap<(&str, &str), f64> = stab_groups
        .into_iter()
        .map(|(k, v)| (k, pairwise_sum(&v) / v.len() as f64))
        .collect();

    let mut acc_by: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
    for (o, d) in obs.iter().zip(&acc_deltas) {
        acc_by.entry((&o.decoder, &o.strategy)).or_default().push(*d);
    }
    let mut stab_by: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
    for (&(t, d, s), &v) in &stab {
        stab_by.entry((d, s)).or_default().push(v - stab_means[&(t, d)]);
    }

    let summarize = |v: &[f64]| {
        let mut sorted = v.to_vec();
        sorted.sort_by(f64::total_cmp);
        (
            pairwise_sum(v) / v.len() as f64,
            percentile_sorted(&sorted, 0.25),
            percentile_sorted(&sorted, 0.75),
        )
    };
    Ok(acc_by
        .iter()
        .map(|(&(decoder, strategy), deltas)| {
            let (m, q25, q75) = summarize(deltas);
            let s = stab_by.get(&(decoder, strategy)).map(|v| summarize(v));
            TradeoffRow {
                decoder: decoder.to_string(),
                strategy: strategy.to_string(),
                n: deltas.len(),
                mean_delta_accuracy: m,
                q25_delta_accuracy: q25,
                q75_delta_accuracy: q75,
                mean_delta_stability: s.map(|s| s.0),
                q25_delta_stability: s.map(|s| s.1),
                q75_delta_stability: s.map(|s| s.2),
            }
        })
        .collect())
}
