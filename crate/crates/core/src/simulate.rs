//! Synthetic two-class data with temporally autocorrelated noise.
//!
//! Class `+1` is centred on `(μ, …, μ)` and class `−1` on `(−μ, …, −μ)`.
//! The noise is white Gaussian, smoothed along the sample axis with a
//! truncated Gaussian kernel and (by default) rescaled back to unit
//! marginal variance, so `μ` alone sets the difficulty.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// How class labels are laid out along the sample axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelLayout {
    /// Every block holds a run of one class followed by a run of the other.
    BlockRuns,
    /// Like `BlockRuns`, but the order of the two runs flips from one block
    /// to the next, so each run straddles a block boundary.
    Straddling,
    /// Labels alternate sample by sample.
    Alternating,
    /// A balanced random permutation within every block.
    Shuffled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub mu: f64,
    pub n_features: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub smoothing_sigma: f64,
    pub n_blocks: usize,
    pub seed: u64,
    pub rescale_noise: bool,
    pub label_layout: LabelLayout,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            mu: 0.1,
            n_features: 100,
            n_train: 200,
            n_test: 10_000,
            smoothing_sigma: 2.0,
            n_blocks: 10,
            seed: 0,
            rescale_noise: true,
            label_layout: LabelLayout::Straddling,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSimulation(m));
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be ≥ 0, got {}", self.mu));
        }
        if self.n_features == 0 {
            return bad("n_features must be positive".into());
        }
        if self.n_train < 2 || self.n_test < 2 {
            return bad("n_train and n_test must be ≥ 2".into());
        }
        if !(self.smoothing_sigma > 0.0 && self.smoothing_sigma.is_finite()) {
            return bad(format!("smoothing_sigma must be > 0, got {}", self.smoothing_sigma));
        }
        if self.n_blocks == 0 || self.n_train % self.n_blocks != 0 {
            return bad(format!(
                "n_train ({}) is not divisible into {} equal blocks",
                self.n_train, self.n_blocks
            ));
        }
        let block_len = self.n_train / self.n_blocks;
        if block_len < 2 {
            return bad("every block needs at least 2 samples so it holds both classes".into());
        }
        if self.n_test < self.n_blocks * 2 {
            return bad("n_test must allow 2 samples per block".into());
        }
        Ok(())
    }
}

/// Truncated (±4σ) Gaussian kernel normalized to unit sum.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (4.0 * sigma).ceil() as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

fn reflect(mut idx: isize, n: isize) -> usize {
    // half-sample symmetric: d c b a | a b c d | d c b a
    loop {
        if idx < 0 {
            idx = -idx - 1;
        } else if idx >= n {
            idx = 2 * n - idx - 1;
        } else {
            return idx as usize;
        }
    }
}

/// Convolves a series with a centred kernel, reflecting at both ends.
pub fn smooth_series(series: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = series.len() as isize;
    let radius = (kernel.len() / 2) as isize;
    (0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * series[reflect(i + k as isize - radius, n)])
                .sum()
        })
        .collect()
}

fn labels_for(n: usize, n_blocks: usize, layout: LabelLayout, rng: &mut ChaCha8Rng) -> Vec<i8> {
    if layout == LabelLayout::Alternating {
        return (0..n).map(|i| if i % 2 == 0 { -1 } else { 1 }).collect();
    }
    let mut labels = Vec::with_capacity(n);
    let mut neg_total = 0usize;
    for (b, len) in block_lengths(n, n_blocks).into_iter().enumerate() {
        // the extra sample of an odd block goes to the minority class
        let mut n_neg = len / 2;
        if len % 2 == 1 && 2 * neg_total <= labels.len() {
            n_neg += 1;
        }
        neg_total += n_neg;
        let start = labels.len();
        let neg = std::iter::repeat_n(-1, n_neg);
        let pos = std::iter::repeat_n(1, len - n_neg);
        if layout == LabelLayout::Straddling && b % 2 == 1 {
            labels.extend(pos.chain(neg));
        } else {
            labels.extend(neg.chain(pos));
        }
        if layout == LabelLayout::Shuffled {
            labels[start..].shuffle(rng);
        }
    }
    labels
}

fn block_lengths(n: usize, n_blocks: usize) -> Vec<usize> {
    (0..n_blocks)
        .map(|b| (b + 1) * n / n_blocks - b * n / n_blocks)
        .collect()
}

fn make_set(
    name: &str,
    prefix: &str,
    n: usize,
    config: &SimulationConfig,
    kernel: &[f64],
    noise_scale: f64,
    rng: &mut ChaCha8Rng,
    label_rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    let d = config.n_features;
    let labels = labels_for(n, config.n_blocks, config.label_layout, label_rng);
    let mut x = Array2::<f64>::zeros((n, d));
    for j in 0..d {
        let white: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let smooth = smooth_series(&white, kernel);
        for i in 0..n {
            x[[i, j]] = smooth[i] / noise_scale + config.mu * labels[i] as f64;
        }
    }
    let mut blocks = Vec::with_capacity(n);
    for (b, len) in block_lengths(n, config.n_blocks).into_iter().enumerate() {
        blocks.extend(std::iter::repeat_n(format!("{prefix}{b}"), len));
    }
    Dataset::new(name, x, labels, blocks)
}

/// Generates `(train, test)`. Train blocks are `n_blocks` contiguous equal
/// runs; the test set uses the same number of contiguous runs.
pub fn generate(config: &SimulationConfig) -> Result<(Dataset, Dataset)> {
    config.validate()?;
    let kernel = gaussian_kernel(config.smoothing_sigma);
    let noise_scale = if config.rescale_noise {
        kernel.iter().map(|w| w * w).sum::<f64>().sqrt()
    } else {
        1.0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // labels draw from their own stream so the noise is layout-independent
    let mut label_rng = ChaCha8Rng::seed_from_u64(config.seed);
    label_rng.set_stream(1);
    let name = format!("simulation_mu{}", config.mu);
    let train = make_set(&name, "b", config.n_train, config, &kernel, noise_scale, &mut rng, &mut label_rng)?;
    let test = make_set(&name, "t", config.n_test, config, &kernel, noise_scale, &mut rng, &mut label_rng)?;
    Ok((train, test))
}

/// Unit vector along `(1, …, 1)`: the optimal discriminant direction for
/// isotropic class-conditional noise.
pub fn bayes_direction(config: &SimulationConfig) -> Result<Vec<f64>> {
    if config.mu <= 0.0 {
        return Err(Error::NoDiscriminativeDirection);
    }
    let d = config.n_features;
    Ok(vec![1.0 / (d as f64).sqrt(); d])
}

/// Analytic lag-`k` autocorrelation of white noise filtered by `kernel`.
pub fn kernel_autocorrelation(kernel: &[f64], lag: usize) -> f64 {
    let energy: f64 = kernel.iter().map(|w| w * w).sum();
    let cross: f64 = kernel.iter().zip(kernel.iter().skip(lag)).map(|(a, b)| a * b).sum();
    cross / energy
}
