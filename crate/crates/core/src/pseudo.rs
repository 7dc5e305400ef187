//! Positive pseudo-label generation and quality measurement on unknown labels.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{LabelValue, PartialLabelMatrix, PseudoLabelGrid, ScoreMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryQuality {
    /// `None` when nothing was recalled.
    pub precision: Option<f64>,
    /// `None` when the category has no unknown positives.
    pub recall: Option<f64>,
    pub recalled_count: usize,
    pub true_positive_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoLabelReport {
    pub per_category: Vec<CategoryQuality>,
    /// Mean over categories that recalled at least one label.
    pub mean_precision: Option<f64>,
    /// Mean over categories that recalled at least one label.
    pub mean_recall: Option<f64>,
    /// Mean over every category with a defined recall.
    pub mean_recall_all: Option<f64>,
}

impl PseudoLabelReport {
    pub fn recalled_total(&self) -> usize {
        self.per_category.iter().map(|q| q.recalled_count).sum()
    }
}

/// Marks unknown positions whose score is strictly above the category
/// threshold. Known positions are never marked.
pub fn generate_pseudo_labels(
    scores: &ScoreMatrix,
    labels: &PartialLabelMatrix,
    thresholds: &[f64],
) -> Result<PseudoLabelGrid> {
    labels.ensure_dim(scores.dim())?;
    if thresholds.len() != labels.n_categories() {
        return Err(Error::Dimension {
            expected: (1, labels.n_categories()),
            actual: (1, thresholds.len()),
        });
    }
    Ok(Array2::from_shape_fn(labels.dim(), |(i, j)| {
        labels.get(i, j) == LabelValue::Unknown && scores.get(i, j) > thresholds[j]
    }))
}

/// Per-category precision and recall of pseudo-labels, counted only over
/// positions that are unknown in `labels`.
pub fn evaluate_pseudo_labels(
    pseudo: &PseudoLabelGrid,
    labels: &PartialLabelMatrix,
    ground_truth: &PartialLabelMatrix,
) -> Result<PseudoLabelReport> {
    labels.ensure_dim(pseudo.dim())?;
    ground_truth.ensure_dim(pseudo.dim())?;
    let (n, c) = labels.dim();
    let mut per_category = Vec::with_capacity(c);
    for j in 0..c {
        let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
        for i in 0..n {
            if labels.get(i, j) != LabelValue::Unknown {
                continue;
            }
            match (pseudo[[i, j]], ground_truth.get(i, j)) {
                (true, LabelValue::Positive) => tp += 1,
                (true, LabelValue::Negative) => fp += 1,
                (false, LabelValue::Positive) => fn_ += 1,
                (_, LabelValue::Unknown) => {
                    return Err(Error::Config("ground truth must be fully labelled".into()))
                }
                (false, LabelValue::Negative) => {}
            }
        }
        let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
        per_category.push(CategoryQuality {
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
            recalled_count: tp + fp,
            true_positive_count: tp,
        });
    }
    let mean = |values: Vec<f64>| (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64);
    let recalled: Vec<&CategoryQuality> = per_category.iter().filter(|q| q.recalled_count > 0).collect();
    Ok(PseudoLabelReport {
        mean_precision: mean(recalled.iter().filter_map(|q| q.precision).collect()),
        mean_recall: mean(recalled.iter().filter_map(|q| q.recall).collect()),
        mean_recall_all: mean(per_category.iter().filter_map(|q| q.recall).collect()),
        per_category,
    })
}
