//! Synthetic multi-label datasets and uniform label masking.
//!
//! Every category owns a prototype vector. A sample's features are the sum of
//! the prototypes of its present categories plus isotropic Gaussian noise, so
//! `separation / noise_scale` controls how learnable the labels are.

use ndarray::{s, Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{LabelValue, PartialLabelMatrix};
use crate::seed::derive_seed;

const MAX_ATTEMPTS: u32 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_samples: usize,
    pub n_categories: usize,
    pub feature_dim: usize,
    /// Approximate pairwise distance between category prototypes.
    pub separation: f64,
    /// Per-category marginal probability of a positive label.
    pub prevalence: Vec<f64>,
    /// Extra probability mass for category `c` when category `c - 1` is present.
    pub cooccurrence_strength: f64,
    pub noise_scale: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Config with the same prevalence for every category.
    pub fn uniform(
        n_samples: usize,
        n_categories: usize,
        feature_dim: usize,
        separation: f64,
        prevalence: f64,
        seed: u64,
    ) -> Self {
        Self {
            n_samples,
            n_categories,
            feature_dim,
            separation,
            prevalence: vec![prevalence; n_categories],
            cooccurrence_strength: 0.0,
            noise_scale: 1.0,
            seed,
        }
    }

    /// Long-tail prevalence `head / (c + 1)`.
    pub fn long_tail(mut self, head: f64) -> Self {
        self.prevalence = long_tail_prevalence(self.n_categories, head);
        self
    }

    pub fn with_cooccurrence(mut self, strength: f64) -> Self {
        self.cooccurrence_strength = strength;
        self
    }

    pub fn with_noise(mut self, noise_scale: f64) -> Self {
        self.noise_scale = noise_scale;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 || self.n_categories == 0 || self.feature_dim == 0 {
            return Err(Error::Config(format!(
                "need n_samples >= 2, n_categories >= 1 and feature_dim >= 1 (got {}, {}, {})",
                self.n_samples, self.n_categories, self.feature_dim
            )));
        }
        if self.prevalence.len() != self.n_categories {
            return Err(Error::Config(format!(
                "prevalence has {} entries for {} categories",
                self.prevalence.len(),
                self.n_categories
            )));
        }
        if let Some(p) = self.prevalence.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(Error::Config(format!("prevalence {p} outside (0, 1)")));
        }
        if !(0.0..=1.0).contains(&self.cooccurrence_strength) {
            return Err(Error::Config(format!(
                "cooccurrence_strength {} outside [0, 1]",
                self.cooccurrence_strength
            )));
        }
        if !(self.separation >= 0.0 && self.separation.is_finite()) {
            return Err(Error::Config(format!("separation {} must be >= 0", self.separation)));
        }
        if !(self.noise_scale > 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::Config(format!("noise_scale {} must be > 0", self.noise_scale)));
        }
        Ok(())
    }
}

pub fn long_tail_prevalence(n_categories: usize, head: f64) -> Vec<f64> {
    (0..n_categories).map(|c| head / (c as f64 + 1.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDataset {
    pub features: Array2<f64>,
    /// Complete ground truth; contains only `Positive` and `Negative`.
    pub full_labels: PartialLabelMatrix,
    pub config: GeneratorConfig,
}

impl SyntheticDataset {
    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    /// Splits off the trailing `fraction` of samples (rows are i.i.d.).
    pub fn split(&self, fraction: f64) -> Result<(SyntheticDataset, SyntheticDataset)> {
        let n = self.n_samples();
        let n_holdout = (n as f64 * fraction).round() as usize;
        if n_holdout == 0 || n_holdout >= n {
            return Err(Error::Config(format!(
                "split fraction {fraction} leaves an empty side for {n} samples"
            )));
        }
        let cut = n - n_holdout;
        let part = |start: usize, end: usize| -> Result<SyntheticDataset> {
            Ok(SyntheticDataset {
                features: self.features.slice(s![start..end, ..]).to_owned(),
                full_labels: self.full_labels.slice_rows(start, end)?,
                config: GeneratorConfig {
                    n_samples: end - start,
                    ..self.config.clone()
                },
            })
        };
        Ok((part(0, cut)?, part(cut, n)?))
    }
}

/// Draws a dataset; deterministic given `config.seed`.
///
/// If some category ends up with no positive or no negative sample the draw is
/// repeated with the next sub-seed, up to 100 attempts.
pub fn generate(config: &GeneratorConfig) -> Result<SyntheticDataset> {
    config.validate()?;
    let prototypes = sample_prototypes(config);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[1, attempt as u64]));
        let labels = sample_labels(config, &mut rng);
        if !is_degenerate(&labels) {
            let features = sample_features(config, &prototypes, &labels, &mut rng);
            return Ok(SyntheticDataset {
                features,
                full_labels: PartialLabelMatrix::new(labels)?,
                config: config.clone(),
            });
        }
    }
    Err(Error::DegenerateDataset {
        attempts: MAX_ATTEMPTS,
    })
}

fn sample_prototypes(config: &GeneratorConfig) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[0]));
    // Near-orthogonal random directions of norm s / sqrt(2) sit about s apart.
    let radius = config.separation / std::f64::consts::SQRT_2;
    let mut prototypes = Array2::zeros((config.n_categories, config.feature_dim));
    for mut row in prototypes.rows_mut() {
        let direction: Array1<f64> =
            Array1::from_shape_fn(config.feature_dim, |_| rng.sample::<f64, _>(StandardNormal));
        let norm = direction.dot(&direction).sqrt().max(f64::MIN_POSITIVE);
        row.assign(&(direction * (radius / norm)));
    }
    prototypes
}

fn sample_labels(config: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Array2<LabelValue> {
    let (n, c) = (config.n_samples, config.n_categories);
    let mut labels = Array2::from_elem((n, c), LabelValue::Negative);
    for i in 0..n {
        for j in 0..c {
            let base = config.prevalence[j];
            let p = if j > 0 && labels[[i, j - 1]] == LabelValue::Positive {
                base + config.cooccurrence_strength * (1.0 - base)
            } else {
                base
            };
            if rng.random::<f64>() < p {
                labels[[i, j]] = LabelValue::Positive;
            }
        }
    }
    labels
}

fn is_degenerate(labels: &Array2<LabelValue>) -> bool {
    labels.columns().into_iter().any(|col| {
        !col.iter().any(|&v| v == LabelValue::Positive) || !col.iter().any(|&v| v == LabelValue::Negative)
    })
}

fn sample_features(
    config: &GeneratorConfig,
    prototypes: &Array2<f64>,
    labels: &Array2<LabelValue>,
    rng: &mut ChaCha8Rng,
) -> Array2<f64> {
    let mut features = Array2::zeros((config.n_samples, config.feature_dim));
    for (i, mut row) in features.rows_mut().into_iter().enumerate() {
        for (j, proto) in prototypes.rows().into_iter().enumerate() {
            if labels[[i, j]] == LabelValue::Positive {
                row += &proto;
            }
        }
        for x in row.iter_mut() {
            *x += config.noise_scale * rng.sample::<f64, _>(StandardNormal);
        }
    }
    features
}

/// Hides labels uniformly at random: each entry is kept iff an independent
/// `u ~ U[0, 1)` falls below `known_proportion`.
pub fn mask_labels(full: &PartialLabelMatrix, known_proportion: f64, seed: u64) -> Result<PartialLabelMatrix> {
    if !(known_proportion > 0.0 && known_proportion <= 1.0) {
        return Err(Error::Config(format!(
            "known_proportion {known_proportion} outside (0, 1]"
        )));
    }
    if !full.is_fully_known() {
        return Err(Error::Config("masking requires a fully labelled matrix".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = full.view().to_owned();
    for v in entries.iter_mut() {
        let u: f64 = rng.random();
        if u >= known_proportion {
            *v = LabelValue::Unknown;
        }
    }
    PartialLabelMatrix::new(entries)
}
