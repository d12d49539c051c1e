//! Train-only preprocessing: per-feature variance normalization and
//! univariate screening with a two-sample F-score.
//!
//! A [`Preprocessor`] is always fit on a training set and then applied
//! unchanged to any other data, so test statistics never leak into it.

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::stats::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessOptions {
    pub variance_normalization: bool,
    pub screen_fraction: f64,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self {
            variance_normalization: true,
            screen_fraction: 0.2,
        }
    }
}

impl PreprocessOptions {
    pub fn identity() -> Self {
        Self {
            variance_normalization: false,
            screen_fraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    /// Divisor per input feature.
    pub scale: Vec<f64>,
    pub selected: Vec<bool>,
    pub screen_fraction: f64,
    /// Features whose training variance was zero (left unscaled).
    pub zero_variance: Vec<bool>,
}

impl Preprocessor {
    pub fn identity(n_features: usize) -> Self {
        Self {
            scale: vec![1.0; n_features],
            selected: vec![true; n_features],
            screen_fraction: 1.0,
            zero_variance: vec![false; n_features],
        }
    }

    pub fn n_input(&self) -> usize {
        self.scale.len()
    }

    pub fn n_selected(&self) -> usize {
        self.selected.iter().filter(|&&s| s).count()
    }

    pub fn selected_indices(&self) -> Vec<usize> {
        self.selected
            .iter()
            .enumerate()
            .filter_map(|(j, &s)| s.then_some(j))
            .collect()
    }

    /// Scales then masks the columns of `data`.
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        Ok(data.with_features(self.transform(data.features())?))
    }

    pub fn transform(&self, features: &Array2<f64>) -> Result<Array2<f64>> {
        if features.ncols() != self.n_input() {
            return Err(Error::FeatureMismatch {
                expected: self.n_input(),
                found: features.ncols(),
            });
        }
        let idx = self.selected_indices();
        let mut out = features.select(Axis(1), &idx);
        for (k, &j) in idx.iter().enumerate() {
            let s = self.scale[j];
            if s != 1.0 {
                out.column_mut(k).mapv_inplace(|v| v / s);
            }
        }
        Ok(out)
    }

    /// Maps weights over the selected, scaled features back to the input
    /// space: unselected features get 0 and the scaling is folded in, so that
    /// `raw · w_full == transformed · w`.
    pub fn weights_to_input_space(&self, weights: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.n_input()];
        for (k, j) in self.selected_indices().into_iter().enumerate() {
            full[j] = weights[k] / self.scale[j];
        }
        full
    }
}

/// Learns per-feature divisors and returns the normalized training data.
pub fn variance_normalize(train: &Dataset) -> Result<(Preprocessor, Dataset)> {
    if train.n_samples() < 2 {
        return Err(Error::InvalidDataset("variance normalization needs ≥ 2 samples".into()));
    }
    let (scale, zero_variance) = column_stds(train.features());
    let pre = Preprocessor {
        scale,
        selected: vec![true; train.n_features()],
        screen_fraction: 1.0,
        zero_variance,
    };
    let out = pre.apply(train)?;
    Ok((pre, out))
}

fn column_stds(x: &Array2<f64>) -> (Vec<f64>, Vec<bool>) {
    let n = x.nrows() as f64;
    let mut scale = Vec::with_capacity(x.ncols());
    let mut flags = Vec::with_capacity(x.ncols());
    for col in x.columns() {
        let v: Vec<f64> = col.to_vec();
        let m = pairwise_sum(&v) / n;
        let sq: Vec<f64> = v.iter().map(|a| (a - m) * (a - m)).collect();
        let sd = (pairwise_sum(&sq) / (n - 1.0)).sqrt();
        if sd > 0.0 && sd.is_finite() {
            scale.push(sd);
            flags.push(false);
        } else {
            scale.push(1.0);
            flags.push(true);
        }
    }
    (scale, flags)
}

/// Two-sample F-score per feature (between-class over within-class mean
/// squares, 1 and n − 2 degrees of freedom).
///
/// A feature with zero within-class variance scores `+∞` if the class means
/// differ and 0 otherwise.
pub fn f_scores(train: &Dataset) -> Result<Vec<f64>> {
    let (n_neg, n_pos) = train.class_counts();
    if n_neg == 0 || n_pos == 0 {
        return Err(Error::SingleClassScreening);
    }
    let n = train.n_samples() as f64;
    let labels = train.labels();
    let mut scores = Vec::with_capacity(train.n_features());
    for col in train.features().columns() {
        let (mut pos, mut neg) = (Vec::with_capacity(n_pos), Vec::with_capacity(n_neg));
        for (v, &l) in col.iter().zip(labels) {
            if l > 0 { pos.push(*v) } else { neg.push(*v) }
        }
        let mp = pairwise_sum(&pos) / n_pos as f64;
        let mn = pairwise_sum(&neg) / n_neg as f64;
        let grand = pairwise_sum(&col.to_vec()) / n;
        let between = n_pos as f64 * (mp - grand).powi(2) + n_neg as f64 * (mn - grand).powi(2);
        let within_terms: Vec<f64> = pos
            .iter()
            .map(|v| (v - mp).powi(2))
            .chain(neg.iter().map(|v| (v - mn).powi(2)))
            .collect();
        let within = pairwise_sum(&within_terms);
        let score = if n <= 2.0 || within <= 0.0 {
            if between > 0.0 { f64::INFINITY } else { 0.0 }
        } else {
            between / (within / (n - 2.0))
        };
        scores.push(score);
    }
    Ok(scores)
}

/// Number of features kept for a screening fraction: `ceil(fraction · d)`.
pub fn n_retained(fraction: f64, n_features: usize) -> usize {
    // tolerance absorbs representation error such as 0.2 · 100
    let k = (fraction * n_features as f64 - 1e-9).ceil() as usize;
    k.clamp(1, n_features)
}

/// Keeps the `ceil(fraction · d)` features with the highest F-score. Ties
/// are resolved toward the lower feature index.
pub fn univariate_screen(train: &Dataset, fraction: f64) -> Result<Preprocessor> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidSpec(format!("screen fraction {fraction} not in (0, 1]")));
    }
    let scores = f_scores(train)?;
    let d = scores.len();
    let keep = n_retained(fraction, d);
    let mut order: Vec<usize> = (0..d).collect();
    // stable sort keeps ascending index among equal scores
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut selected = vec![false; d];
    for &j in &order[..keep] {
        selected[j] = true;
    }
    Ok(Preprocessor {
        scale: vec![1.0; d],
        selected,
        screen_fraction: fraction,
        zero_variance: vec![false; d],
    })
}

/// Fits the full training-set preprocessing pipeline.
pub fn fit_preprocessor(train: &Dataset, options: &PreprocessOptions) -> Result<Preprocessor> {
    let d = train.n_features();
    let mut pre = if options.screen_fraction < 1.0 {
        univariate_screen(train, options.screen_fraction)?
    } else {
        Preprocessor::identity(d)
    };
    if options.variance_normalization {
        if train.n_samples() < 2 {
            return Err(Error::InvalidDataset("variance normalization needs ≥ 2 samples".into()));
        }
        let (scale, zero_variance) = column_stds(train.features());
        pre.scale = scale;
        pre.zero_variance = zero_variance;
    }
    Ok(pre)
}
