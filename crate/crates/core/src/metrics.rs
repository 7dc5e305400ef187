//! Multi-label evaluation metrics: per-class average precision, overall and
//! per-class precision/recall/F1, and the paired t statistic.
//!
//! Undefined quantities (zero denominators) are reported as `None`.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{LabelValue, PartialLabelMatrix, ScoreMatrix};

/// Default score cut-off used to binarize predictions for F1 metrics.
pub const DEFAULT_PREDICTION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct F1Suite {
    pub op: Option<f64>,
    pub cp: Option<f64>,
    pub or_: Option<f64>,
    pub cr: Option<f64>,
    pub of1: Option<f64>,
    pub cf1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_class_ap: Vec<Option<f64>>,
    pub map: Option<f64>,
    #[serde(flatten)]
    pub f1: F1Suite,
    pub prediction_threshold: f64,
}

/// Non-interpolated AP: mean over positives of the precision at their rank.
///
/// Items are ranked by descending score; ties keep the original index order.
/// Returns `None` when `truth` has no positive.
pub fn average_precision(scores: ArrayView1<'_, f64>, truth: ArrayView1<'_, bool>) -> Option<f64> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // Stable sort keeps index order among equal scores.
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank, &idx) in order.iter().enumerate() {
        if truth[idx] {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
        }
    }
    (hits > 0).then(|| sum / hits as f64)
}

pub fn per_class_average_precision(scores: &ScoreMatrix, truth: ArrayView2<'_, bool>) -> Vec<Option<f64>> {
    (0..scores.n_categories())
        .map(|c| average_precision(scores.column(c), truth.column(c)))
        .collect()
}

pub fn mean_of_defined(values: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

fn harmonic(p: Option<f64>, r: Option<f64>) -> Option<f64> {
    match (p, r) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    }
}

/// OP/OR pool counts over all classes; CP/CR average per-class ratios,
/// skipping classes whose denominator is zero.
pub fn f1_suite(pred: ArrayView2<'_, bool>, truth: ArrayView2<'_, bool>) -> Result<F1Suite> {
    if pred.dim() != truth.dim() {
        return Err(Error::Dimension {
            expected: truth.dim(),
            actual: pred.dim(),
        });
    }
    let classes = pred.ncols();
    let (mut sum_c, mut sum_p, mut sum_g) = (0usize, 0usize, 0usize);
    let (mut class_p, mut class_r) = (Vec::new(), Vec::new());
    for i in 0..classes {
        let (p_col, g_col) = (pred.column(i), truth.column(i));
        let correct = p_col.iter().zip(g_col).filter(|(&p, &g)| p && g).count();
        let predicted = p_col.iter().filter(|&&p| p).count();
        let actual = g_col.iter().filter(|&&g| g).count();
        sum_c += correct;
        sum_p += predicted;
        sum_g += actual;
        if predicted > 0 {
            class_p.push(Some(correct as f64 / predicted as f64));
        }
        if actual > 0 {
            class_r.push(Some(correct as f64 / actual as f64));
        }
    }
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    let op = ratio(sum_c, sum_p);
    let or_ = ratio(sum_c, sum_g);
    let cp = mean_of_defined(&class_p);
    let cr = mean_of_defined(&class_r);
    Ok(F1Suite {
        op,
        cp,
        or_,
        cr,
        of1: harmonic(op, or_),
        cf1: harmonic(cp, cr),
    })
}

/// Positive-class indicator grid from a fully labelled matrix.
pub fn positive_grid(truth: &PartialLabelMatrix) -> Array2<bool> {
    truth.view().mapv(|v| v == LabelValue::Positive)
}

/// Full evaluation of scores against complete ground truth.
pub fn evaluate(scores: &ScoreMatrix, truth: &PartialLabelMatrix, prediction_threshold: f64) -> Result<EvalReport> {
    truth.ensure_dim(scores.dim())?;
    let truth = positive_grid(truth);
    let per_class_ap = per_class_average_precision(scores, truth.view());
    let pred = scores.view().mapv(|s| s > prediction_threshold);
    Ok(EvalReport {
        map: mean_of_defined(&per_class_ap),
        per_class_ap,
        f1: f1_suite(pred.view(), truth.view())?,
        prediction_threshold,
    })
}

/// Paired t statistic `mean(d) / (sd(d) / sqrt(n))` with the n-1 sample
/// standard deviation. Returns the statistic and `n`.
pub fn paired_t_test(differences: &[f64]) -> Result<(f64, usize)> {
    let n = differences.len();
    if n < 2 {
        return Err(Error::TooFewPairs(n));
    }
    let mean = differences.iter().sum::<f64>() / n as f64;
    let var = differences.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Err(Error::ZeroVariance { mean });
    }
    Ok((mean / (var.sqrt() / (n as f64).sqrt()), n))
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation with average ranks for ties; `None` when either
/// side is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Area under the ROC curve, ties counted as one half.
pub fn roc_auc(scores: ArrayView1<'_, f64>, truth: ArrayView1<'_, bool>) -> Option<f64> {
    let values: Vec<f64> = scores.to_vec();
    let ranks = average_ranks(&values);
    let n_pos = truth.iter().filter(|&&t| t).count();
    let n_neg = truth.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let rank_sum: f64 = ranks.iter().zip(truth).filter(|(_, &t)| t).map(|(r, _)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos * n_neg) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ap_worked_examples() {
        let ap = average_precision(array![0.9, 0.8, 0.3].view(), array![true, false, true].view()).unwrap();
        assert!((ap - 0.5 * (1.0 + 2.0 / 3.0)).abs() < 1e-12);
        let ap = average_precision(array![0.9, 0.8, 0.3, 0.1].view(), array![true, true, false, false].view());
        assert_eq!(ap, Some(1.0));
        let ap = average_precision(array![0.9, 0.8, 0.3, 0.1].view(), array![false, false, false, true].view());
        assert_eq!(ap, Some(0.25));
        assert_eq!(average_precision(array![0.5].view(), array![false].view()), None);
    }

    #[test]
    fn ap_ties_follow_index_order() {
        let ap = average_precision(array![0.5, 0.5].view(), array![false, true].view()).unwrap();
        assert_eq!(ap, 0.5);
        let ap = average_precision(array![0.5, 0.5].view(), array![true, false].view()).unwrap();
        assert_eq!(ap, 1.0);
    }

    #[test]
    fn f1_worked_example() {
        let pred = array![[true, true], [true, false], [false, false]];
        let truth = array![[true, true], [false, true], [false, false]];
        let f = f1_suite(pred.view(), truth.view()).unwrap();
        assert!((f.op.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((f.or_.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((f.of1.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((f.cp.unwrap() - 0.75).abs() < 1e-12);
        assert!((f.cr.unwrap() - 0.75).abs() < 1e-12);
        assert!((f.cf1.unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn f1_perfect_and_empty() {
        let truth = array![[true, false], [false, true], [true, true]];
        let f = f1_suite(truth.view(), truth.view()).unwrap();
        for v in [f.op, f.cp, f.or_, f.cr, f.of1, f.cf1] {
            assert_eq!(v, Some(1.0));
        }
        let none = Array2::from_elem((3, 2), false);
        let f = f1_suite(none.view(), truth.view()).unwrap();
        assert_eq!(f.or_, Some(0.0));
        assert_eq!(f.cr, Some(0.0));
        assert_eq!(f.op, None);
        assert_eq!(f.of1, None);
        assert_eq!(f.cf1, None);
        assert!(f1_suite(none.view(), array![[true]].view()).is_err());
    }

    #[test]
    fn t_test_examples() {
        let (t, n) = paired_t_test(&[2.0, 0.0, 1.0, 3.0, -1.0]).unwrap();
        assert_eq!(n, 5);
        assert!((t - 2f64.sqrt()).abs() < 1e-6);
        assert_eq!(paired_t_test(&[1.0, -1.0]).unwrap().0, 0.0);
        assert!(matches!(paired_t_test(&[1.0, 1.0, 1.0]), Err(Error::ZeroVariance { .. })));
        assert!(matches!(paired_t_test(&[1.0]), Err(Error::TooFewPairs(1))));
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]), None);
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-12);
    }

    #[test]
    fn auc_basics() {
        assert_eq!(roc_auc(array![0.9, 0.1].view(), array![true, false].view()), Some(1.0));
        assert_eq!(roc_auc(array![0.1, 0.9].view(), array![true, false].view()), Some(0.0));
        assert_eq!(roc_auc(array![0.5, 0.5].view(), array![true, false].view()), Some(0.5));
        assert_eq!(roc_auc(array![0.5].view(), array![true].view()), None);
    }

    #[test]
    fn random_scores_map_tracks_prevalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 10_000;
        let scores = Array1::from_shape_fn(n, |_| rng.random::<f64>());
        let truth = Array1::from_shape_fn(n, |_| rng.random::<f64>() < 0.5);
        let ap = average_precision(scores.view(), truth.view()).unwrap();
        let prevalence = truth.iter().filter(|&&t| t).count() as f64 / n as f64;
        assert!((ap - prevalence).abs() < 0.05, "{ap} vs {prevalence}");
    }

    #[test]
    fn evaluate_reports_map_and_f1() {
        let scores = ScoreMatrix::from_rows(&[vec![0.9, 0.2], vec![0.3, 0.8], vec![0.6, 0.4]]).unwrap();
        let truth = PartialLabelMatrix::from_codes(&[vec![1, -1], vec![-1, 1], vec![1, -1]]).unwrap();
        let r = evaluate(&scores, &truth, 0.5).unwrap();
        assert_eq!(r.map, Some(1.0));
        assert_eq!(r.f1.of1, Some(1.0));
        assert_eq!(r.prediction_threshold, 0.5);
    }

    proptest! {
        #[test]
        fn ap_invariant_under_monotone_transform(
            pairs in prop::collection::vec((0.0f64..1.0, any::<bool>()), 1..30),
        ) {
            let scores = Array1::from_iter(pairs.iter().map(|p| p.0));
            let truth = Array1::from_iter(pairs.iter().map(|p| p.1));
            let squashed = scores.mapv(|s| (3.0 * s).exp() + 1.0);
            prop_assert_eq!(average_precision(scores.view(), truth.view()), average_precision(squashed.view(), truth.view()));
        }

        #[test]
        fn t_statistic_is_antisymmetric(d in prop::collection::vec(-5.0f64..5.0, 2..20)) {
            if let Ok((t, _)) = paired_t_test(&d) {
                let neg: Vec<f64> = d.iter().map(|x| -x).collect();
                prop_assert_eq!(paired_t_test(&neg).unwrap().0, -t);
            }
        }

        #[test]
        fn f1_components_satisfy_harmonic_identity(
            cells in prop::collection::vec((any::<bool>(), any::<bool>()), 12),
        ) {
            let pred = Array2::from_shape_fn((4, 3), |(i, j)| cells[i * 3 + j].0);
            let truth = Array2::from_shape_fn((4, 3), |(i, j)| cells[i * 3 + j].1);
            let f = f1_suite(pred.view(), truth.view()).unwrap();
            if let (Some(p), Some(r)) = (f.op, f.or_) {
                if p + r > 0.0 {
                    prop_assert_eq!(f.of1, Some(2.0 * p * r / (p + r)));
                }
            }
            if let (Some(p), Some(r)) = (f.cp, f.cr) {
                if p + r > 0.0 {
                    prop_assert_eq!(f.cf1, Some(2.0 * p * r / (p + r)));
                }
            }
        }
    }
}
