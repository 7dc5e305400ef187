//! Semantic-aware threshold learning for multi-label classification with
//! partial labels.
//!
//! Each category gets its own pseudo-labelling threshold, estimated every
//! epoch from quantiles of the model's scores on known positives and known
//! negatives and smoothed with an exponential moving average. Unknown labels
//! scoring above their category's threshold become positive pseudo-labels,
//! and a hinge-style ranking loss pushes known scores to the correct side of
//! the threshold.
//!
//! The crate ships a synthetic benchmark generator, a small
//! hand-differentiated classifier, the two-stage training loop, evaluation
//! metrics, and an experiment runner. See `examples/` for a tour:
//!
//! | example | shows |
//! |---|---|
//! | `synthetic_data` | generating and masking a dataset |
//! | `threshold_estimation` | boundary quantiles and the EMA update |
//! | `pseudo_labels` | generating, fusing and scoring pseudo-labels |
//! | `losses` | partial BCE, the ranking loss, and gradient checks |
//! | `train` | one two-stage run with per-epoch reporting |
//! | `ablation` | threshold strategies compared on one dataset |
//! | `sweeps` | γ and κ sweeps |
//! | `metrics` | mAP, F1 variants and paired t-tests |

pub mod data;
pub mod distribution;
pub mod error;
pub mod experiment;
pub mod io;
pub mod labels;
pub mod loss;
pub mod metrics;
pub mod model;
pub mod pseudo;
pub mod seed;
pub mod threshold;
pub mod train;

pub use error::{Error, Result};
pub use labels::{FusedLabelMatrix, LabelValue, PartialLabelMatrix, ScoreMatrix};
pub use train::{train, ThresholdMode, TrainConfig, TrainRun};
