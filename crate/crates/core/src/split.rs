//! Train/test partitions: leave-one-sample-out, leave-one-block-out and
//! repeated random block splits.
//!
//! Block-wise strategies never put samples of one block on both sides of a
//! split. Randomized strategies are pure functions of the dataset shape,
//! their parameters and the seed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

const MAX_STRATIFY_ATTEMPTS: usize = 1000;
/// Largest accepted gap between the test-side and overall positive rate
/// when stratified sampling is enabled.
pub const STRATIFY_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub strategy: String,
    pub seed: Option<u64>,
    pub splits: Vec<Split>,
}

impl SplitPlan {
    pub fn len(&self) -> usize {
        self.splits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.splits.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Checks disjointness, non-emptiness and bounds against `n_samples`.
    pub fn validate(&self, n_samples: usize) -> Result<()> {
        for (k, s) in self.splits.iter().enumerate() {
            if s.train.is_empty() || s.test.is_empty() {
                return Err(Error::InvalidSplit(format!("split {k} has an empty side")));
            }
            let mut seen = vec![false; n_samples];
            for &i in s.train.iter().chain(&s.test) {
                if i >= n_samples {
                    return Err(Error::InvalidSplit(format!("split {k}: index {i} out of bounds")));
                }
                if seen[i] {
                    return Err(Error::InvalidSplit(format!("split {k}: index {i} repeated")));
                }
                seen[i] = true;
            }
        }
        Ok(())
    }
}

/// Cross-validation strategy description, as used in configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CvStrategy {
    LeaveOneSampleOut,
    LeaveOneBlockOut,
    ShuffledBlocks {
        n_splits: usize,
        #[serde(default = "default_test_fraction")]
        test_fraction: f64,
        #[serde(default)]
        stratified: bool,
    },
}

fn default_test_fraction() -> f64 {
    0.2
}

impl CvStrategy {
    pub fn shuffled(n_splits: usize) -> Self {
        CvStrategy::ShuffledBlocks {
            n_splits,
            test_fraction: 0.2,
            stratified: false,
        }
    }

    /// The five strategies benchmarked by default.
    pub fn benchmark_defaults() -> Vec<CvStrategy> {
        vec![
            CvStrategy::LeaveOneSampleOut,
            CvStrategy::LeaveOneBlockOut,
            CvStrategy::shuffled(3),
            CvStrategy::shuffled(10),
            CvStrategy::shuffled(50),
        ]
    }

    pub fn name(&self) -> String {
        match self {
            CvStrategy::LeaveOneSampleOut => "loo_sample".into(),
            CvStrategy::LeaveOneBlockOut => "loo_block".into(),
            CvStrategy::ShuffledBlocks { n_splits, test_fraction, stratified } => {
                let mut s = format!("shuffle_{n_splits}x{}", (test_fraction * 100.0).round());
                if *stratified {
                    s.push_str("_strat");
                }
                s
            }
        }
    }

    pub fn is_blockwise(&self) -> bool {
        !matches!(self, CvStrategy::LeaveOneSampleOut)
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, CvStrategy::ShuffledBlocks { .. })
    }

    pub fn plan(&self, dataset: &Dataset, seed: u64) -> Result<SplitPlan> {
        match *self {
            CvStrategy::LeaveOneSampleOut => leave_one_sample_out(dataset),
            CvStrategy::LeaveOneBlockOut => leave_one_block_out(dataset),
            CvStrategy::ShuffledBlocks { n_splits, test_fraction, stratified } => {
                ShuffleOptions { n_splits, test_fraction, stratified }.plan(dataset, seed, "shuffled_blocks")
            }
        }
    }
}

pub fn leave_one_sample_out(dataset: &Dataset) -> Result<SplitPlan> {
    let n = dataset.n_samples();
    if n < 2 {
        return Err(Error::InvalidSplit("leave-one-out needs ≥ 2 samples".into()));
    }
    let splits = (0..n)
        .map(|i| Split {
            train: (0..n).filter(|&j| j != i).collect(),
            test: vec![i],
        })
        .collect();
    Ok(SplitPlan {
        strategy: "leave_one_sample_out".into(),
        seed: None,
        splits,
    })
}

pub fn leave_one_block_out(dataset: &Dataset) -> Result<SplitPlan> {
    let nb = dataset.n_blocks();
    if nb < 2 {
        return Err(Error::TooFewBlocks);
    }
    let blocks = dataset.blocks();
    let splits = (0..nb)
        .map(|b| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..dataset.n_samples()).partition(|&i| blocks[i] == b);
            Split { train, test }
        })
        .collect();
    Ok(SplitPlan {
        strategy: "leave_one_block_out".into(),
        seed: None,
        splits,
    })
}

/// Number of blocks drawn into the test side: `max(1, round(f · n_blocks))`.
pub fn test_block_count(test_fraction: f64, n_blocks: usize) -> usize {
    ((test_fraction * n_blocks as f64).round() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShuffleOptions {
    pub n_splits: usize,
    pub test_fraction: f64,
    pub stratified: bool,
}

impl ShuffleOptions {
    fn plan(&self, dataset: &Dataset, seed: u64, name: &str) -> Result<SplitPlan> {
        let nb = dataset.n_blocks();
        if nb < 2 {
            return Err(Error::TooFewBlocks);
        }
        if self.n_splits == 0 {
            return Err(Error::InvalidSplit("n_splits must be positive".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::InvalidSplit(format!(
                "test fraction {} not in (0, 1)",
                self.test_fraction
            )));
        }
        let n_test = test_block_count(self.test_fraction, nb);
        if n_test >= nb {
            return Err(Error::InvalidSplit(format!(
                "{n_test} of {nb} blocks on the test side leaves no training block"
            )));
        }

        let blocks = dataset.blocks();
        let labels = dataset.labels();
        let overall_pos = dataset.class_counts().1 as f64 / dataset.n_samples() as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..nb).collect();
        let mut splits = Vec::with_capacity(self.n_splits);
        for _ in 0..self.n_splits {
            let mut attempts = 0;
            let split = loop {
                order.shuffle(&mut rng);
                let mut is_test = vec![false; nb];
                for &b in &order[..n_test] {
                    is_test[b] = true;
                }
                let (test, train): (Vec<usize>, Vec<usize>) =
                    (0..dataset.n_samples()).partition(|&i| is_test[blocks[i]]);
                if !self.stratified || balanced(&train, &test, labels, overall_pos) {
                    break Split { train, test };
                }
                attempts += 1;
                if attempts >= MAX_STRATIFY_ATTEMPTS {
                    return Err(Error::InvalidSplit(format!(
                        "no class-balanced block draw found in {MAX_STRATIFY_ATTEMPTS} attempts"
                    )));
                }
            };
            splits.push(split);
        }
        Ok(SplitPlan {
            strategy: name.into(),
            seed: Some(seed),
            splits,
        })
    }
}

fn balanced(train: &[usize], test: &[usize], labels: &[i8], overall_pos: f64) -> bool {
    let pos = |idx: &[usize]| idx.iter().filter(|&&i| labels[i] > 0).count();
    let (tr, te) = (pos(train), pos(test));
    let both = tr > 0 && tr < train.len() && te > 0 && te < test.len();
    both && (te as f64 / test.len() as f64 - overall_pos).abs() <= STRATIFY_TOLERANCE
}

/// Repeated random block splits with `round(test_fraction · n_blocks)` test
/// blocks per split.
pub fn shuffled_block_split(
    dataset: &Dataset,
    n_splits: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<SplitPlan> {
    ShuffleOptions { n_splits, test_fraction, stratified: false }.plan(dataset, seed, "shuffled_blocks")
}

/// Outer validation splits: the test side of each split is the validation
/// set, the train side is the decoding set handed to nested CV.
pub fn validation_split(
    dataset: &Dataset,
    n_repeats: usize,
    validation_fraction: f64,
    seed: u64,
) -> Result<SplitPlan> {
    ShuffleOptions { n_splits: n_repeats, test_fraction: validation_fraction, stratified: false }
        .plan(dataset, seed, "validation")
}
