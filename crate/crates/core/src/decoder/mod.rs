//! Regularized linear decoders.
//!
//! Every variant minimizes
//!
//! ```text
//! F(w, b) = mean_i loss(y_i · (x_i · w + b)) + p(w) / C
//! ```
//!
//! with `loss` the hinge or logistic loss and `p` either `‖w‖₁` or `‖w‖₂²`.
//! The intercept `b` is never penalized. Each loss/penalty pair has its own
//! solver:
//!
//! | loss     | penalty | solver                                         |
//! |----------|---------|------------------------------------------------|
//! | hinge    | l2      | SMO on the box-constrained dual ([`smo`])      |
//! | hinge    | l1      | simplex on the dual linear program ([`simplex`]) |
//! | logistic | l2      | damped Newton ([`newton`])                     |
//! | logistic | l1      | accelerated proximal gradient ([`fista`])      |
//!
//! For the hinge loss the intercept is recomputed exactly once `w` is known
//! ([`intercept`]).

pub mod fista;
pub mod intercept;
pub mod newton;
pub mod simplex;
pub mod smo;

use std::fmt;

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::preprocess::{fit_preprocessor, PreprocessOptions, Preprocessor};
use crate::stats::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    Hinge,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Penalty {
    L1,
    L2,
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Loss::Hinge => "hinge",
            Loss::Logistic => "logistic",
        })
    }
}

impl fmt::Display for Penalty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Penalty::L1 => "l1",
            Penalty::L2 => "l2",
        })
    }
}

pub fn hinge_loss(margin: f64) -> f64 {
    (1.0 - margin).max(0.0)
}

/// `ln(1 + e^{−margin})` without overflow.
pub fn logistic_loss(margin: f64) -> f64 {
    if margin > 0.0 {
        (-margin).exp().ln_1p()
    } else {
        -margin + margin.exp().ln_1p()
    }
}

/// Derivative of [`logistic_loss`]: `−1 / (1 + e^{margin})`.
pub fn logistic_loss_derivative(margin: f64) -> f64 {
    if margin > 0.0 {
        let e = (-margin).exp();
        -e / (1.0 + e)
    } else {
        -1.0 / (1.0 + margin.exp())
    }
}

/// Second derivative of [`logistic_loss`].
pub fn logistic_loss_curvature(margin: f64) -> f64 {
    let e = (-margin.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

impl Loss {
    pub fn value(self, margin: f64) -> f64 {
        match self {
            Loss::Hinge => hinge_loss(margin),
            Loss::Logistic => logistic_loss(margin),
        }
    }
}

impl Penalty {
    pub fn value(self, w: &[f64]) -> f64 {
        let terms: Vec<f64> = match self {
            Penalty::L1 => w.iter().map(|v| v.abs()).collect(),
            Penalty::L2 => w.iter().map(|v| v * v).collect(),
        };
        pairwise_sum(&terms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderSpec {
    pub loss: Loss,
    pub penalty: Penalty,
    #[serde(rename = "C", default = "default_c")]
    pub c: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_true")]
    pub fit_intercept: bool,
}

fn default_c() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    1e-7
}

fn default_max_iter() -> usize {
    5000
}

fn default_true() -> bool {
    true
}

impl DecoderSpec {
    pub fn new(loss: Loss, penalty: Penalty, c: f64) -> Self {
        Self {
            loss,
            penalty,
            c,
            tol: default_tol(),
            max_iter: default_max_iter(),
            fit_intercept: true,
        }
    }

    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }

    /// The four loss/penalty pairs at `C = 1`.
    pub fn defaults() -> Vec<DecoderSpec> {
        vec![
            DecoderSpec::new(Loss::Hinge, Penalty::L2, 1.0),
            DecoderSpec::new(Loss::Hinge, Penalty::L1, 1.0),
            DecoderSpec::new(Loss::Logistic, Penalty::L2, 1.0),
            DecoderSpec::new(Loss::Logistic, Penalty::L1, 1.0),
        ]
    }

    /// Short label such as `svm_l2` or `logreg_l1`.
    pub fn label(&self) -> String {
        let loss = match self.loss {
            Loss::Hinge => "svm",
            Loss::Logistic => "logreg",
        };
        format!("{loss}_{}", self.penalty)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidSpec(format!("C must be finite and > 0, got {}", self.c)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidSpec(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidSpec("max_iter must be positive".into()));
        }
        Ok(())
    }

    /// Penalty weight `1 / C`.
    pub fn lambda(&self) -> f64 {
        1.0 / self.c
    }
}

/// Problem handed to a solver: features are already preprocessed.
pub(crate) struct Problem<'a> {
    pub x: &'a Array2<f64>,
    pub y: Vec<f64>,
    pub lambda: f64,
    pub fit_intercept: bool,
    pub tol: f64,
    pub max_iter: usize,
}

pub(crate) struct Solution {
    pub w: Vec<f64>,
    pub b: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// `F(w, b)` on the given (already preprocessed) features and ±1 labels.
pub fn objective(
    x: &Array2<f64>,
    y: &[i8],
    w: &[f64],
    b: f64,
    loss: Loss,
    penalty: Penalty,
    c: f64,
) -> f64 {
    let wv = ArrayView1::from(w);
    let losses: Vec<f64> = x
        .rows()
        .into_iter()
        .zip(y)
        .map(|(row, &yi)| loss.value(yi as f64 * (row.dot(&wv) + b)))
        .collect();
    pairwise_sum(&losses) / y.len() as f64 + penalty.value(w) / c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    /// Weights over the preprocessor's retained features.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub preprocessor: Preprocessor,
    pub spec: DecoderSpec,
    pub objective_value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Fits `spec` on `data` as given (identity preprocessing).
pub fn train(data: &Dataset, spec: &DecoderSpec) -> Result<TrainedModel> {
    fit_transformed(data, spec, Preprocessor::identity(data.n_features()))
}

/// Fits the preprocessing on `data`, then the decoder on the transformed
/// training data.
pub fn fit(data: &Dataset, spec: &DecoderSpec, options: &PreprocessOptions) -> Result<TrainedModel> {
    spec.validate()?;
    if !data.has_both_classes() {
        return Err(Error::SingleClassTraining);
    }
    data.check_finite()?;
    let pre = fit_preprocessor(data, options)?;
    fit_transformed(data, spec, pre)
}

fn fit_transformed(data: &Dataset, spec: &DecoderSpec, pre: Preprocessor) -> Result<TrainedModel> {
    spec.validate()?;
    if !data.has_both_classes() {
        return Err(Error::SingleClassTraining);
    }
    data.check_finite()?;
    let x = pre.transform(data.features())?;
    let problem = Problem {
        x: &x,
        y: data.labels().iter().map(|&l| l as f64).collect(),
        lambda: spec.lambda(),
        fit_intercept: spec.fit_intercept,
        tol: spec.tol,
        max_iter: spec.max_iter,
    };
    let sol = match (spec.loss, spec.penalty) {
        (Loss::Hinge, Penalty::L2) => smo::solve(&problem),
        (Loss::Hinge, Penalty::L1) => simplex::solve(&problem),
        (Loss::Logistic, Penalty::L2) => newton::solve(&problem),
        (Loss::Logistic, Penalty::L1) => fista::solve(&problem),
    };
    let objective_value = objective(&x, data.labels(), &sol.w, sol.b, spec.loss, spec.penalty, spec.c);
    Ok(TrainedModel {
        weights: sol.w,
        intercept: sol.b,
        preprocessor: pre,
        spec: *spec,
        objective_value,
        converged: sol.converged,
        iterations: sol.iterations,
    })
}

/// A plain linear function on raw input features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn decision_function(&self, data: &Dataset) -> Result<Array1<f64>> {
        if data.n_features() != self.weights.len() {
            return Err(Error::FeatureMismatch {
                expected: self.weights.len(),
                found: data.n_features(),
            });
        }
        let w = ArrayView1::from(&self.weights);
        Ok(data.features().dot(&w) + self.intercept)
    }

    pub fn predict(&self, data: &Dataset) -> Result<Vec<i8>> {
        Ok(sign_labels(&self.decision_function(data)?))
    }
}

impl TrainedModel {
    /// `x · w + b` after applying the stored preprocessor.
    pub fn decision_function(&self, data: &Dataset) -> Result<Array1<f64>> {
        let x = self.preprocessor.transform(data.features())?;
        let w = ArrayView1::from(&self.weights);
        Ok(x.dot(&w) + self.intercept)
    }

    pub fn predict(&self, data: &Dataset) -> Result<Vec<i8>> {
        Ok(sign_labels(&self.decision_function(data)?))
    }

    /// Same decision function expressed on raw input features, with
    /// unselected features at zero.
    pub fn to_linear(&self) -> LinearModel {
        LinearModel {
            weights: self.preprocessor.weights_to_input_space(&self.weights),
            intercept: self.intercept,
        }
    }

    pub fn n_nonzero(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0.0).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Sign with zero mapped to `+1`.
pub fn sign_labels(values: &Array1<f64>) -> Vec<i8> {
    values.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect()
}

/// `n` log-spaced values from `10^lo` to `10^hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![10f64.powf(lo)],
        _ => (0..n)
            .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// Default tuning grid: 11 values from 1e-5 to 1e5.
pub fn default_grid() -> Vec<f64> {
    log_grid(-5.0, 5.0, 11)
}
