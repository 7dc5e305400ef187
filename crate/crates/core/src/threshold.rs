//! Class-specific threshold estimation.
//!
//! For each category, the negative boundary is the `kappa_neg` quantile of
//! known-negative scores and the positive boundary is the `kappa_pos`
//! quantile of known-positive scores. The ideal threshold is the larger of
//! the two: when the distributions are well separated the positive boundary
//! wins and the threshold sits in the low-density gap, and when they overlap
//! the negative boundary wins and the threshold stays high. Live thresholds
//! track the ideal ones with an exponential moving average.

use serde::{Deserialize, Serialize};

use crate::distribution::{empirical_quantile, ClassDistribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SateConfig {
    pub kappa_neg: f64,
    pub kappa_pos: f64,
    /// EMA momentum: weight kept on the previous threshold.
    pub gamma: f64,
    pub initial_threshold: f64,
    /// Minimum known samples required on each side before estimating.
    pub min_known_count: usize,
}

impl Default for SateConfig {
    fn default() -> Self {
        Self {
            kappa_neg: 0.999,
            kappa_pos: 0.1,
            gamma: 0.3,
            initial_threshold: 1.0,
            min_known_count: 10,
        }
    }
}

impl SateConfig {
    /// Defaults with `gamma` picked from the known-label proportion:
    /// 0.3 up to 30% known labels, 0.5 above.
    pub fn for_known_proportion(known_proportion: f64) -> Self {
        Self {
            gamma: default_gamma(known_proportion),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {v} must lie in (0, 1)")))
            }
        };
        open("kappa_neg", self.kappa_neg)?;
        open("kappa_pos", self.kappa_pos)?;
        open("gamma", self.gamma)?;
        if !(self.initial_threshold > 0.0 && self.initial_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "initial_threshold = {} must lie in (0, 1]",
                self.initial_threshold
            )));
        }
        if self.min_known_count == 0 {
            return Err(Error::Config("min_known_count must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn default_gamma(known_proportion: f64) -> f64 {
    if known_proportion <= 0.3 {
        0.3
    } else {
        0.5
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdState {
    pub thresholds: Vec<f64>,
    pub config: SateConfig,
    pub epoch: usize,
}

impl ThresholdState {
    pub fn new(n_categories: usize, config: SateConfig) -> Self {
        Self {
            thresholds: vec![config.initial_threshold; n_categories],
            config,
            epoch: 0,
        }
    }

    /// State with explicit per-category thresholds, e.g. a fixed baseline.
    pub fn with_thresholds(thresholds: Vec<f64>, config: SateConfig) -> Self {
        Self {
            thresholds,
            config,
            epoch: 0,
        }
    }

    pub fn n_categories(&self) -> usize {
        self.thresholds.len()
    }

    pub fn step(&mut self, ideal: &[Option<f64>]) -> Result<()> {
        *self = update_thresholds(self, ideal)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundaries {
    pub tau_neg: f64,
    pub tau_pos: f64,
}

impl Boundaries {
    pub fn ideal(&self) -> f64 {
        ideal_threshold(self.tau_neg, self.tau_pos)
    }
}

/// Negative and positive boundary thresholds for one category.
///
/// Fails with [`Error::InsufficientData`] when either side has fewer than
/// `min_known_count` samples; callers keep the previous threshold then.
pub fn boundary_thresholds(dist: &ClassDistribution, config: &SateConfig) -> Result<Boundaries> {
    let (pos, neg) = (dist.positive_scores.len(), dist.negative_scores.len());
    if pos < config.min_known_count || neg < config.min_known_count {
        return Err(Error::InsufficientData {
            category: dist.category,
            positives: pos,
            negatives: neg,
            required: config.min_known_count,
        });
    }
    Ok(Boundaries {
        tau_neg: empirical_quantile(&dist.negative_scores, config.kappa_neg)?,
        tau_pos: empirical_quantile(&dist.positive_scores, config.kappa_pos)?,
    })
}

pub fn ideal_threshold(tau_neg: f64, tau_pos: f64) -> f64 {
    tau_neg.max(tau_pos)
}

/// Boundaries for every category; `None` where data is insufficient.
pub fn estimate_boundaries(dists: &[ClassDistribution], config: &SateConfig) -> Vec<Option<Boundaries>> {
    dists
        .iter()
        .map(|d| boundary_thresholds(d, config).ok())
        .collect()
}

/// One EMA step `tau <- gamma * tau + (1 - gamma) * ideal`, clamped into
/// (0, 1]. Categories without an ideal value keep their threshold.
pub fn update_thresholds(state: &ThresholdState, ideal: &[Option<f64>]) -> Result<ThresholdState> {
    if ideal.len() != state.n_categories() {
        return Err(Error::Dimension {
            expected: (1, state.n_categories()),
            actual: (1, ideal.len()),
        });
    }
    let gamma = state.config.gamma;
    let thresholds = state
        .thresholds
        .iter()
        .zip(ideal)
        .map(|(&tau, target)| match target {
            Some(star) => (star + gamma * (tau - star)).clamp(f64::MIN_POSITIVE, 1.0),
            None => tau,
        })
        .collect();
    Ok(ThresholdState {
        thresholds,
        config: state.config,
        epoch: state.epoch + 1,
    })
}
