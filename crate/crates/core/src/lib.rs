//! Cross-validation strategies, hyper-parameter tuning and weight-stability
//! metrics for regularized linear decoders.
//!
//! The crate is organised bottom-up:
//!
//! * [`data`] and [`preprocess`]: the [`Dataset`] type and the train-only
//!   preprocessing steps (variance normalization, univariate screening).
//! * [`simulate`]: two-class Gaussian data with temporally smoothed noise.
//! * [`split`]: sample-wise and block-wise train/test partitions.
//! * [`decoder`]: hinge/logistic losses with `l1`/`l2` penalties.
//! * [`tuning`]: nested cross-validation with refit, averaging and fixed-C
//!   strategies.
//! * [`evaluation`]: accuracy, CV discrepancy, stability and tradeoff
//!   summaries.
//! * [`harness`]: declarative experiments, CSV records and reports.
//!
//! Work that fans out over splits, grid values or repeats goes through
//! [`Execution`]; with the `parallel` feature it runs on rayon, otherwise
//! everything is sequential. Results never depend on the execution mode.

pub mod data;
pub mod decoder;
pub mod error;
pub mod evaluation;
pub mod harness;
pub mod par;
pub mod preprocess;
pub mod simulate;
pub mod split;
pub mod stats;
pub mod tuning;

pub use data::Dataset;
pub use decoder::{DecoderSpec, Loss, Penalty, TrainedModel};
pub use error::{Error, Result};
pub use par::Execution;
pub use preprocess::{PreprocessOptions, Preprocessor};
pub use simulate::SimulationConfig;
pub use split::{Split, SplitPlan};
pub use tuning::{TuningOutcome, TuningStrategy};
