//! Generate a long-tailed synthetic benchmark, hide most of its labels, and
//! split off a validation block.
//!
//!     cargo run --example synthetic_data

use satl::data::{generate, mask_labels, GeneratorConfig};

fn main() -> satl::Result<()> {
    let config = GeneratorConfig::uniform(2000, 8, 32, 6.0, 0.1, 42)
        .long_tail(0.5)
        .with_cooccurrence(0.3);
    let dataset = generate(&config)?;
    println!(
        "{} samples, {} features, {} categories",
        dataset.n_samples(),
        dataset.features.ncols(),
        dataset.full_labels.n_categories()
    );

    let masked = mask_labels(&dataset.full_labels, 0.2, 7)?;
    let total = masked.n_samples() * masked.n_categories();
    println!("known labels: {} of {} ({:.1}%)", masked.total_known(), total, 100.0 * masked.total_known() as f64 / total as f64);

    println!("category  prevalence  positives  known");
    for c in 0..config.n_categories {
        let positives = dataset.full_labels.view().column(c).iter().filter(|v| v.code() == 1).count();
        let known = masked.view().column(c).iter().filter(|v| v.is_known()).count();
        println!("{c:>8}  {:>10.3}  {positives:>9}  {known:>5}", config.prevalence[c]);
    }

    let (train, holdout) = dataset.split(0.2)?;
    println!("train rows {}, holdout rows {}", train.n_samples(), holdout.n_samples());
    Ok(())
}
