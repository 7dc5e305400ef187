//! Per-category score distributions of known samples, exact empirical
//! quantiles, and histogram summaries for plotting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{LabelValue, PartialLabelMatrix, ScoreMatrix};

/// Number of histogram bins used for exported plot data.
pub const DEFAULT_BINS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub category: usize,
    pub positive_scores: Vec<f64>,
    pub negative_scores: Vec<f64>,
}

impl ClassDistribution {
    pub fn new(category: usize) -> Self {
        Self {
            category,
            positive_scores: Vec::new(),
            negative_scores: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSummary {
    pub category: usize,
    pub bin_edges: Vec<f64>,
    pub positive_counts: Vec<usize>,
    pub negative_counts: Vec<usize>,
}

/// Collects the scores of known positives and known negatives per category.
pub fn accumulate(scores: &ScoreMatrix, labels: &PartialLabelMatrix) -> Result<Vec<ClassDistribution>> {
    labels.ensure_dim(scores.dim())?;
    let mut dists: Vec<ClassDistribution> = (0..labels.n_categories()).map(ClassDistribution::new).collect();
    for ((i, j), &label) in labels.view().indexed_iter() {
        match label {
            LabelValue::Positive => dists[j].positive_scores.push(scores.get(i, j)),
            LabelValue::Negative => dists[j].negative_scores.push(scores.get(i, j)),
            LabelValue::Unknown => {}
        }
    }
    Ok(dists)
}

/// Lower empirical quantile: the smallest sample `v` with
/// `#{x <= v} / n >= q`. No interpolation, so the result is always a sample.
pub fn empirical_quantile(samples: &[f64], q: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted_quantile(&sorted, q))
}

/// Same as [`empirical_quantile`] on an already ascending, non-empty slice.
pub fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let nf = n as f64;
    let covers = |k: usize| (k as f64) / nf >= q;
    // k is the number of samples at or below the answer; start from the
    // closed form and correct for rounding in q * n.
    let mut k = ((q * nf).ceil() as usize).clamp(1, n);
    while k > 1 && covers(k - 1) {
        k -= 1;
    }
    while k < n && !covers(k) {
        k += 1;
    }
    sorted[k - 1]
}

pub fn histogram(dist: &ClassDistribution, bins: usize) -> Result<HistogramSummary> {
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let bin_edges: Vec<f64> = (0..=bins).map(|b| b as f64 / bins as f64).collect();
    let count = |scores: &[f64]| {
        let mut counts = vec![0usize; bins];
        for &s in scores {
            // Half-open bins, last bin closed on the right.
            let b = ((s * bins as f64).floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
        counts
    };
    Ok(HistogramSummary {
        category: dist.category,
        positive_counts: count(&dist.positive_scores),
        negative_counts: count(&dist.negative_scores),
        bin_edges,
    })
}
