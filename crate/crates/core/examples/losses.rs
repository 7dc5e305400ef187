//! The partial BCE and ranking losses on a tiny batch, followed by a
//! finite-difference check of the classifier's parameter gradients.
//!
//!     cargo run --example losses

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satl::labels::FusedLabelMatrix;
use satl::loss::{differential_ranking_loss, partial_bce, satl_loss};
use satl::model::{gradient_check, Architecture, Batch, Classifier, LossSelector};
use satl::{PartialLabelMatrix, ScoreMatrix};

fn main() -> satl::Result<()> {
    let scores = ScoreMatrix::from_rows(&[vec![0.9, 0.2, 0.6], vec![0.3, 0.8, 0.5]])?;
    let known = PartialLabelMatrix::from_codes(&[vec![1, -1, 0], vec![-1, 0, 1]])?;
    let thresholds = [0.7, 0.7, 0.7];

    println!("partial BCE   {:.6}", partial_bce(&scores, &known)?.loss);
    println!("ranking loss  {:.6}", differential_ranking_loss(&scores, &known, &thresholds)?.loss);
    let fused = FusedLabelMatrix::from_known(&known);
    let (breakdown, _) = satl_loss(&scores, &fused, &known, &thresholds, 0.01)?;
    println!("combined      {:.6} (cls {:.6} + {} * drl {:.6})", breakdown.total, breakdown.cls_loss, breakdown.lambda, breakdown.drl_loss);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let features = Array2::from_shape_fn((6, 4), |_| rng.random_range(-1.0..1.0));
    let labels = PartialLabelMatrix::from_codes(
        &(0..6).map(|_| (0..3).map(|_| rng.random_range(-1..=1)).collect()).collect::<Vec<Vec<i64>>>(),
    )?;
    let fused = FusedLabelMatrix::from_known(&labels);
    let batch = Batch {
        features: features.view(),
        known: &labels,
        fused: &fused,
        thresholds: &[0.45, 0.5, 0.55],
    };
    for arch in [Architecture::Linear, Architecture::Mlp { hidden: 5 }] {
        let model = Classifier::new(arch, 4, 3, 11)?;
        let check = gradient_check(&model, &batch, LossSelector::Combined { lambda: 0.01 })?;
        println!("{arch:?}: {} parameters, max relative error {:.2e}", model.num_params(), check.max_relative_error);
    }
    Ok(())
}
