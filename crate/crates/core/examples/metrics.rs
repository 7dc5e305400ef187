//! Ranking and thresholded metrics on hand-made scores, plus a paired t-test
//! between two methods.
//!
//!     cargo run --example metrics

use ndarray::array;
use satl::metrics::{average_precision, evaluate, f1_suite, paired_t_test, roc_auc};
use satl::{PartialLabelMatrix, ScoreMatrix};

fn main() -> satl::Result<()> {
    let scores = array![0.9, 0.8, 0.7, 0.6];
    let truth = array![true, false, true, false];
    println!("AP  {:?}", average_precision(scores.view(), truth.view()));
    println!("AUC {:?}", roc_auc(scores.view(), truth.view()));

    let pred = array![[true, true], [true, false], [false, false]];
    let gold = array![[true, false], [true, true], [false, true]];
    let f1 = f1_suite(pred.view(), gold.view())?;
    println!("OP {:?} OR {:?} OF1 {:?}", f1.op, f1.or_, f1.of1);
    println!("CP {:?} CR {:?} CF1 {:?}", f1.cp, f1.cr, f1.cf1);

    let s = ScoreMatrix::from_rows(&[vec![0.9, 0.2], vec![0.7, 0.6], vec![0.1, 0.8]])?;
    let t = PartialLabelMatrix::from_codes(&[vec![1, -1], vec![1, 1], vec![-1, 1]])?;
    let report = evaluate(&s, &t, 0.5)?;
    println!("mAP {:?}, per-class AP {:?}", report.map, report.per_class_ap);

    let (t_stat, n) = paired_t_test(&[2.0, 0.0, 1.0, 3.0, -1.0])?;
    println!("paired t = {t_stat:.4} over {n} pairs");
    Ok(())
}
