//! Turn confident unknown scores into positive pseudo-labels, merge them
//! with the known labels, and score them against the hidden truth.
//!
//!     cargo run --example pseudo_labels

use satl::labels::fuse_labels;
use satl::pseudo::{evaluate_pseudo_labels, generate_pseudo_labels};
use satl::{PartialLabelMatrix, ScoreMatrix};

fn main() -> satl::Result<()> {
    let truth = PartialLabelMatrix::from_codes(&[vec![1, -1, 1], vec![1, 1, -1], vec![-1, 1, 1], vec![-1, -1, 1]])?;
    let known = PartialLabelMatrix::from_codes(&[vec![1, 0, 0], vec![0, 1, 0], vec![-1, 0, 0], vec![0, -1, 0]])?;
    let scores = ScoreMatrix::from_rows(&[
        vec![0.95, 0.30, 0.91],
        vec![0.88, 0.90, 0.40],
        vec![0.10, 0.85, 0.97],
        vec![0.20, 0.05, 0.60],
    ])?;
    let thresholds = [0.8, 0.8, 0.9];

    let pseudo = generate_pseudo_labels(&scores, &known, &thresholds)?;
    println!("pseudo-labels:\n{pseudo}");
    let fused = fuse_labels(&known, &pseudo)?;
    println!("fused label codes:\n{}", fused.labels().codes());

    let report = evaluate_pseudo_labels(&pseudo, &known, &truth)?;
    for (c, q) in report.per_category.iter().enumerate() {
        println!(
            "category {c}: recalled {} precision {:?} recall {:?}",
            q.recalled_count, q.precision, q.recall
        );
    }
    Ok(())
}
