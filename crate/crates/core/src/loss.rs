//! Partial BCE, the differential ranking loss, and their combination, each
//! returning the loss together with its gradient with respect to the scores.
//!
//! Gradients are taken w.r.t. the scores `p`; [`score_to_logit_grad`] chains
//! them through the logistic function for backpropagation.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{FusedLabelMatrix, LabelValue, PartialLabelMatrix, ScoreMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub cls_loss: f64,
    pub drl_loss: f64,
    pub total: f64,
    pub lambda: f64,
}

impl LossBreakdown {
    pub fn new(cls_loss: f64, drl_loss: f64, lambda: f64) -> Self {
        Self {
            cls_loss,
            drl_loss,
            total: cls_loss + lambda * drl_loss,
            lambda,
        }
    }

    pub fn zero(lambda: f64) -> Self {
        Self::new(0.0, 0.0, lambda)
    }

    /// Adds another batch's terms; `total` is recomputed from the sums.
    pub fn accumulate(&mut self, other: &LossBreakdown) {
        *self = Self::new(self.cls_loss + other.cls_loss, self.drl_loss + other.drl_loss, self.lambda);
    }
}

pub struct LossOutput {
    pub loss: f64,
    pub grad: Array2<f64>,
}

/// Negated partial-label log-likelihood, summed over samples.
///
/// Each sample contributes `-(1/k) * sum_c [y=+1] log p + [y=-1] log(1-p)`
/// where `k` is its number of known labels; rows with `k = 0` contribute 0.
pub fn partial_bce(scores: &ScoreMatrix, labels: &PartialLabelMatrix) -> Result<LossOutput> {
    labels.ensure_dim(scores.dim())?;
    let mut grad = Array2::zeros(scores.dim());
    let mut loss = 0.0;
    for i in 0..labels.n_samples() {
        let k = labels.known_count(i);
        if k == 0 {
            continue;
        }
        let inv_k = 1.0 / k as f64;
        let mut row_sum = 0.0;
        for j in 0..labels.n_categories() {
            let p = scores.get(i, j);
            match labels.get(i, j) {
                LabelValue::Positive => {
                    row_sum += p.ln();
                    grad[[i, j]] = -inv_k / p;
                }
                LabelValue::Negative => {
                    row_sum += (1.0 - p).ln();
                    grad[[i, j]] = inv_k / (1.0 - p);
                }
                LabelValue::Unknown => {}
            }
        }
        loss -= inv_k * row_sum;
    }
    Ok(LossOutput { loss, grad })
}

/// Hinge on the margin above the class threshold, over known labels only.
///
/// With `d = max(0, p - tau)`, a known positive contributes `1 - d` and a
/// known negative `1 + d`. Thresholds are constants for differentiation; the
/// subgradient at `p = tau` is taken as 0.
pub fn differential_ranking_loss(
    scores: &ScoreMatrix,
    labels: &PartialLabelMatrix,
    thresholds: &[f64],
) -> Result<LossOutput> {
    labels.ensure_dim(scores.dim())?;
    if thresholds.len() != labels.n_categories() {
        return Err(Error::Dimension {
            expected: (1, labels.n_categories()),
            actual: (1, thresholds.len()),
        });
    }
    let mut grad = Array2::zeros(scores.dim());
    let mut loss = 0.0;
    for ((i, j), &label) in labels.view().indexed_iter() {
        let sign = match label {
            LabelValue::Positive => -1.0,
            LabelValue::Negative => 1.0,
            LabelValue::Unknown => continue,
        };
        let gap = scores.get(i, j) - thresholds[j];
        let d = gap.max(0.0);
        loss += 1.0 + sign * d;
        if gap > 0.0 {
            grad[[i, j]] = sign;
        }
    }
    Ok(LossOutput { loss, grad })
}

/// Stage-two objective: partial BCE on the fused labels plus `lambda` times
/// the ranking loss on the known labels.
pub fn satl_loss(
    scores: &ScoreMatrix,
    fused: &FusedLabelMatrix,
    known: &PartialLabelMatrix,
    thresholds: &[f64],
    lambda: f64,
) -> Result<(LossBreakdown, Array2<f64>)> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::Config(format!("lambda = {lambda} must be >= 0")));
    }
    let cls = partial_bce(scores, fused.labels())?;
    let drl = differential_ranking_loss(scores, known, thresholds)?;
    let mut grad = cls.grad;
    grad.scaled_add(lambda, &drl.grad);
    Ok((LossBreakdown::new(cls.loss, drl.loss, lambda), grad))
}

/// Chains `dL/dp` into `dL/dz` for `p = sigmoid(z)`.
pub fn score_to_logit_grad(scores: &ScoreMatrix, grad: &Array2<f64>) -> Array2<f64> {
    let mut out = grad.clone();
    ndarray::Zip::from(&mut out)
        .and(&scores.view())
        .for_each(|g, &p| *g *= p * (1.0 - p));
    out
}
